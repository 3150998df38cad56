//! Per-degree comparison reports, and the audits that compare one module's
//! output against an independent computation in another.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ass::{e2_dims, e_infinity};
use crate::error::Result;
use crate::ku::{assoc_graded_dims, b_duality_shift, CoreCharts, KuCohomology};
use crate::margolis::{
    build_piece, cohomology_k2, ext_bruteforce, ext_required_top, margolis_closed_form, Piece, Primitive,
};
use crate::padic::Prime;
use crate::series::{free_part_ps, nonfree_ps, trivial_count};

/// One comparison of two independently computed counts. `at` carries any
/// coordinate beyond the degree (a filtration, an operator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub degree: i64,
    pub at: Option<String>,
    pub lhs: u64,
    pub rhs: u64,
    pub pass: bool,
}

impl AuditRow {
    pub fn compare(degree: i64, lhs: u64, rhs: u64) -> Self {
        AuditRow { degree, at: None, lhs, rhs, pass: lhs == rhs }
    }

    pub fn with_at(mut self, at: String) -> Self {
        self.at = Some(at);
        self
    }
}

/// A named list of rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub name: String,
    pub prime: u32,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn new(name: &str, prime: u32) -> Self {
        AuditReport { name: String::from(name), prime, rows: Vec::new() }
    }

    pub fn push(&mut self, row: AuditRow) {
        self.rows.push(row);
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

fn bigraded(report: &mut AuditReport, lhs: &BTreeMap<(i64, u32), u64>, rhs: &BTreeMap<(i64, u32), u64>) {
    let mut keys: Vec<(i64, u32)> = lhs.keys().chain(rhs.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    for (n, s) in keys {
        let l = lhs.get(&(n, s)).copied().unwrap_or(0);
        let r = rhs.get(&(n, s)).copied().unwrap_or(0);
        report.push(AuditRow::compare(n, l, r).with_at(format!("s={s}")));
    }
}

/// Brute-force `Ext_{E_1}(F_p, H^*K_2)` against the closed-form E_2 term
/// plus the unit `P[h_0, v]` and the `s = 0` classes of the free summands.
pub fn ext_audit(p: Prime, n_hi: i64, s_max: u32) -> Result<AuditReport> {
    let module = cohomology_k2(p, ext_required_top(p, n_hi, s_max));
    let table = ext_bruteforce(&module, n_hi, s_max)?;
    let vd = p.v_degree();
    let mut want: BTreeMap<(i64, u32), u64> = e2_dims(p, n_hi, s_max)
        .into_iter()
        .filter(|((n, _), _)| *n >= table.n_lo)
        .map(|(k, v)| (k, v as u64))
        .collect();
    for n in table.n_lo..=n_hi {
        if n <= 0 && n % vd == 0 {
            for s in (-n / vd) as u32..=s_max {
                *want.entry((n, s)).or_insert(0) += 1;
            }
        }
        let t = trivial_count(p, n)?;
        if t > 0 {
            *want.entry((n, 0)).or_insert(0) += t as u64;
        }
    }
    let got: BTreeMap<(i64, u32), u64> = table.dims.iter().map(|(k, v)| (*k, *v as u64)).collect();
    let mut report = AuditReport::new("ext", p.get());
    bigraded(&mut report, &got, &want);
    Ok(report)
}

/// E_∞ from the differential replay against the closed-form chart, per
/// `(degree, filtration)`, for degrees `<= n_hi`.
pub fn einfty_audit(p: Prime, n_hi: i64) -> Result<AuditReport> {
    let ku = KuCohomology::new(p, n_hi)?;
    let chart = ku.chart().bidegree_counts(i64::MIN / 4, n_hi);
    let s_top = chart.keys().map(|k| k.1).max().unwrap_or(0);
    let run = e_infinity(p, n_hi, s_top + 4)?;
    let got: BTreeMap<(i64, u32), u64> = run.trusted_dims().into_iter().map(|(k, v)| (k, v as u64)).collect();
    let mut report = AuditReport::new("einfty", p.get());
    bigraded(&mut report, &got, &chart);
    Ok(report)
}

/// Homology groups against cohomology shifted by `2p` (log-orders and
/// summand counts).
pub fn homology_shift_audit(p: Prime, n_max: i64) -> Result<AuditReport> {
    let ku = KuCohomology::new(p, n_max + p.homology_shift())?;
    let mut report = AuditReport::new("homology-shift", p.get());
    for n in 0..=n_max {
        let h = ku.homology_group_at(n)?;
        let c = ku.group_at(n + p.homology_shift())?;
        let same = h == c;
        let mut row = AuditRow::compare(n, h.log_order() as u64, c.log_order() as u64);
        row.pass &= same;
        report.push(row);
    }
    Ok(report)
}

/// `B_k^dual` in degree `m` against `B_k` in degree `m + shift`, on the
/// rank of `p^a v^b` for `a <= k + 2`, `b <= p^k`.
pub fn b_self_duality_audit(p: Prime, k: u32) -> Result<AuditReport> {
    let b = CoreCharts::new(p).b(k)?.clone();
    let vd = p.v_degree();
    let bmax = p.pow(k) as u32;
    let shift = b_duality_shift(p, k);
    let pad = vd * bmax as i64;
    let lo = b.min_degree().unwrap_or(0) - pad;
    let hi = b.max_degree().unwrap_or(0) + pad;
    let real = b.realize(lo - shift, hi + shift)?;
    let dual = real.dualize();
    let mut report = AuditReport::new(&format!("B_{k} self-duality"), p.get());
    for n in lo..=hi {
        for a in 0..=k + 2 {
            for bb in 0..=bmax {
                let lhs = dual.rank_invariant(n - shift, a, bb)?;
                let rhs = real.rank_invariant(n, a, bb)?;
                report.push(AuditRow::compare(n, lhs as u64, rhs as u64).with_at(format!("p^{a} v^{bb}")));
            }
        }
    }
    Ok(report)
}

/// Margolis homology of the cohomology module against its closed form, in
/// degrees `0..=top - |Q|`.
pub fn margolis_audit(p: Prime, top: i64) -> AuditReport {
    let h = cohomology_k2(p, top);
    let mut report = AuditReport::new("margolis", p.get());
    for q in [Primitive::Q0, Primitive::Q1] {
        let got = h.margolis_homology(q);
        let want = margolis_closed_form(p, q, got.len().saturating_sub(1));
        for (d, &g) in got.iter().enumerate() {
            let tag = match q {
                Primitive::Q0 => "Q0",
                Primitive::Q1 => "Q1",
            };
            report.push(AuditRow::compare(d as i64, g as u64, want.coeff(d).max(0) as u64).with_at(String::from(tag)));
        }
    }
    report
}

/// The non-free module built from its pieces against the non-free
/// Poincaré series, its Margolis homology against that of the whole
/// cohomology, and nonnegativity of the free-part generator series.
pub fn free_part_audit(p: Prime, top: i64) -> Result<AuditReport> {
    let t = build_piece(p, Piece::T, top)?;
    let ps = nonfree_ps(p, top as usize);
    let h = cohomology_k2(p, top);
    let mut report = AuditReport::new("ps", p.get());
    for d in 0..=top {
        report.push(
            AuditRow::compare(d, t.dim(d) as u64, ps.coeff(d as usize).max(0) as u64).with_at(String::from("dim")),
        );
    }
    for (q, tag) in [(Primitive::Q0, "Q0"), (Primitive::Q1, "Q1")] {
        let (a, b) = (t.margolis_homology(q), h.margolis_homology(q));
        for (d, (x, y)) in a.iter().zip(&b).enumerate() {
            report.push(AuditRow::compare(d as i64, *x as u64, *y as u64).with_at(String::from(tag)));
        }
    }
    let free = free_part_ps(p, top as usize);
    report.push(AuditRow {
        degree: top,
        at: Some(String::from("free part nonnegative")),
        lhs: free.is_ok() as u64,
        rhs: 1,
        pass: free.is_ok(),
    });
    Ok(report)
}

/// Dot counts from the associated-graded formula against the assembled
/// chart, degrees `0..=n_max`.
pub fn assoc_graded_audit(p: Prime, n_max: i64) -> Result<AuditReport> {
    let ku = KuCohomology::new(p, n_max)?;
    let counts = ku.chart().bidegree_counts(0, n_max);
    let mut per_degree: BTreeMap<i64, u64> = BTreeMap::new();
    for ((n, _), c) in counts {
        *per_degree.entry(n).or_insert(0) += c;
    }
    let mut report = AuditReport::new("associated-graded", p.get());
    for n in 0..=n_max {
        report.push(AuditRow::compare(n, assoc_graded_dims(p, n)?, per_degree.get(&n).copied().unwrap_or(0)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_and_failures() {
        let mut r = AuditReport::new("x", 2);
        r.push(AuditRow::compare(0, 1, 1));
        assert!(r.pass());
        r.push(AuditRow::compare(1, 1, 2).with_at(String::from("s=0")));
        assert!(!r.pass());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn small_ext_window() {
        let r = ext_audit(Prime::new(2).unwrap(), 20, 3).unwrap();
        assert!(r.pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
