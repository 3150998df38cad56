//! The ku-cohomology of K(Z/p, 2) as a direct sum of shifted copies of the
//! building blocks `A_k`, `B_k` (even degrees) and `S_{k,l}` (odd degrees).
//!
//! `B_k` is assembled from `z_{k-1}^{p-1} B_{k-1}`, a v-tower on `z_k` of
//! height `p^k - k`, and `y_{k-1}^{p-1} B_{k-1}`; `A_k` from
//! `z_{k-1}^{p-1} B_{k-1}`, a v-tower on `z_k` of height `p^k`, and
//! `y_{k-1}^{p-1} A_{k-1}`. The pieces are glued by
//! `p z_k = v z_{k-1}^p` and `p y_{k-1}^{p-1} z_{k-1} = v^{p^{k-1}(p-1)} z_k`;
//! the copied edges and the second rule can land on the same dot, which is
//! how two-target extensions arise.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::chart::{AbelianPGroup, Chart, Dot, EdgeKind};
use crate::error::{Error, Result};
use crate::monomial::{Factor, Monomial, MonomialFamily};
use crate::padic::{nu, Prime};

fn height(p: Prime, e: u32, minus: u32) -> Result<u32> {
    p.checked_pow(e)
        .and_then(|x| u32::try_from(x - minus as i64).ok())
        .ok_or_else(|| Error::Overflow(format!("tower height {}^{e}", p.get())))
}

/// Memoized `A_k` and `B_k` for one prime.
#[derive(Debug, Clone)]
pub struct CoreCharts {
    prime: Prime,
    a: Vec<Chart>,
    b: BTreeMap<u32, Chart>,
}

impl CoreCharts {
    pub fn new(prime: Prime) -> Self {
        CoreCharts { prime, a: Vec::new(), b: BTreeMap::new() }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// `B_k`; an error for `k < k0`, where `B_k` is zero.
    pub fn b(&mut self, k: u32) -> Result<&Chart> {
        let p = self.prime;
        if k < p.k0() {
            return Err(Error::MalformedChart(format!("B_{k} is zero for p = {}", p.get())));
        }
        if !self.b.contains_key(&k) {
            let prev = if k > p.k0() { Some(self.b(k - 1)?.clone()) } else { None };
            let chart = assemble(p, k, prev.as_ref(), prev.as_ref(), height(p, k, k)?)?;
            self.b.insert(k, chart);
        }
        Ok(&self.b[&k])
    }

    /// `A_k` for `k >= 0`.
    pub fn a(&mut self, k: u32) -> Result<&Chart> {
        let p = self.prime;
        while self.a.len() <= k as usize {
            let j = self.a.len() as u32;
            let chart = if j == 0 {
                let mut c = Chart::new(p);
                c.add_tower(Monomial::z(0, 1), 0, 1)?;
                c
            } else {
                let lower_b = if j > p.k0() { Some(self.b(j - 1)?.clone()) } else { None };
                let lower_a = self.a[j as usize - 1].clone();
                assemble(p, j, lower_b.as_ref(), Some(&lower_a), height(p, j, 0)?)?
            };
            self.a.push(chart);
        }
        Ok(&self.a[k as usize])
    }
}

/// `z_{k-1}^{p-1} left`, a tower on `z_k`, and `y_{k-1}^{p-1} right`, glued.
fn assemble(p: Prime, k: u32, left: Option<&Chart>, right: Option<&Chart>, z_height: u32) -> Result<Chart> {
    let mut c = Chart::new(p);
    let e = p.get() - 1;
    if let Some(l) = left {
        c.direct_sum(&l.tensor_monomial(&Monomial::z(k - 1, e))?)?;
    }
    let top = c.add_tower(Monomial::z(k, 1), 0, z_height)?;
    if let Some(r) = right {
        c.direct_sum(&r.tensor_monomial(&Monomial::y(p, k - 1, e as u64))?)?;
    }
    if k >= 2 {
        if let Some(t) = c.find_tower(&Monomial::z(k - 1, p.get())) {
            let h = c.towers()[t].height;
            for a in 0..z_height {
                if a + 1 < h {
                    c.add_edge(Dot::new(top, a), Dot::new(t, a + 1), EdgeKind::H0)?;
                }
            }
        }
    }
    let src_gen = Monomial::y(p, k - 1, e as u64).mul(&Monomial::z(k - 1, 1))?;
    if let Some(s) = c.find_tower(&src_gen) {
        let jump = (p.pow(k - 1) * e as i64) as u32;
        let kind = if jump == 1 { EdgeKind::H0 } else { EdgeKind::Exotic };
        for a in 0..c.towers()[s].height {
            if a + jump < z_height {
                c.add_edge(Dot::new(s, a), Dot::new(top, a + jump), kind)?;
            }
        }
    }
    Ok(c)
}

pub fn build_a(p: Prime, k: u32) -> Result<Chart> {
    CoreCharts::new(p).a(k).cloned()
}

pub fn build_b(p: Prime, k: u32) -> Result<Chart> {
    CoreCharts::new(p).b(k).cloned()
}

/// `S_{k,l}`: towers of height `k+1` on `z_{i,l}`, `k0 <= i <= l-k-1+k0`,
/// with `p z_{i,l} = v z_{i-1,l}` and `p z_{k0,l} = 0`.
pub fn build_s(p: Prime, k: u32, l: u32) -> Result<Chart> {
    if k < 1 || l <= k {
        return Err(Error::MalformedChart(format!("S_{{{k},{l}}} needs l > k >= 1")));
    }
    let k0 = p.k0();
    let mut c = Chart::new(p);
    let mut prev: Option<usize> = None;
    for i in k0..=(l - k - 1 + k0) {
        let t = c.add_tower(Monomial::zij(p, i, l), 0, k + 1)?;
        if let Some(lower) = prev {
            for a in 0..k {
                c.add_edge(Dot::new(t, a), Dot::new(lower, a + 1), EdgeKind::H0)?;
            }
        }
        prev = Some(t);
    }
    Ok(c)
}

/// Which building block a summand is a copy of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    A(u32),
    B(u32),
    S(u32, u32),
}

/// One shifted copy `cofactor * block` inside an assembled chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub block: Block,
    pub cofactor: Monomial,
    pub towers: Range<usize>,
}

/// Summands of ku-cohomology (trivial part excluded) touching degrees `<= max_degree`.
#[derive(Debug, Clone)]
pub struct KuCohomology {
    prime: Prime,
    max_degree: i64,
    chart: Chart,
    summands: Vec<Summand>,
}

impl KuCohomology {
    pub fn new(prime: Prime, max_degree: i64) -> Result<Self> {
        let mut cores = CoreCharts::new(prime);
        Self::with_cores(&mut cores, max_degree)
    }

    pub fn with_cores(cores: &mut CoreCharts, max_degree: i64) -> Result<Self> {
        let prime = cores.prime();
        let mut chart = Chart::new(prime);
        let mut summands = Vec::new();
        for (block, m) in even_layout(cores, max_degree)?.into_iter().chain(odd_layout(prime, max_degree)?) {
            let core = match block {
                Block::A(k) => cores.a(k)?.clone(),
                Block::B(k) => cores.b(k)?.clone(),
                Block::S(k, l) => build_s(prime, k, l)?,
            };
            let start = chart.direct_sum(&core.tensor_monomial(&m)?)?;
            summands.push(Summand { block, cofactor: m, towers: start..chart.towers().len() });
        }
        Ok(KuCohomology { prime, max_degree, chart, summands })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn max_degree(&self) -> i64 {
        self.max_degree
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// `ku^n(K_2)` modulo its trivial summand.
    pub fn group_at(&self, n: i64) -> Result<AbelianPGroup> {
        if n > self.max_degree {
            return Err(Error::WindowTooSmall(format!("degree {n} above the assembled bound {}", self.max_degree)));
        }
        self.chart.group_at(n)
    }

    /// `ku_n(K_2)` via the duality `ku_n = (ku^{n+2p})^dual`; finite abelian
    /// p-groups are isomorphic to their duals.
    pub fn homology_group_at(&self, n: i64) -> Result<AbelianPGroup> {
        self.group_at(n + self.prime.homology_shift())
    }
}

/// `(block, cofactor)` pairs for the even part, every copy touching degrees `<= max_degree`.
pub fn even_layout(cores: &mut CoreCharts, max_degree: i64) -> Result<Vec<(Block, Monomial)>> {
    let p = cores.prime();
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let a_min = cores.a(k)?.min_degree().unwrap_or(i64::MAX);
        let b_min = if k >= p.k0() { cores.b(k)?.min_degree().unwrap_or(i64::MAX) } else { i64::MIN };
        if a_min > max_degree && b_min > max_degree {
            break;
        }
        if a_min <= max_degree {
            for m in MonomialFamily::PlacementA(k).enumerate(p, max_degree - a_min) {
                out.push((Block::A(k), m));
            }
        }
        if k >= p.k0() && b_min <= max_degree {
            for m in MonomialFamily::PlacementB(k).enumerate(p, max_degree - b_min) {
                out.push((Block::B(k), m));
            }
        }
        k += 1;
    }
    Ok(out)
}

/// Lowest degree of a dot of `S_{k,l}`.
pub fn s_min_degree(p: Prime, k: u32, l: u32) -> i64 {
    p.zij_degree(l - k - 1 + p.k0(), l) - p.v_degree() * k as i64
}

/// `(block, cofactor)` pairs for the odd part: `q y_1^{i-1} S_{nu(i)+1, l}`
/// times `TP_{p-1}[z_l] Lambda_{l+1}`, `l >= nu(i) + 2`.
pub fn odd_layout(p: Prime, max_degree: i64) -> Result<Vec<(Block, Monomial)>> {
    let mut out = Vec::new();
    let mut i: u64 = 1;
    loop {
        let base = Monomial::q().mul(&Monomial::y(p, 1, i - 1))?;
        let base_deg = base.degree(p);
        let k = nu(p, i)? + 1;
        if base_deg + s_min_degree(p, 1, 2) > max_degree {
            break;
        }
        let mut l = k + 1;
        loop {
            if p.checked_pow(l + 1).is_none() {
                break;
            }
            let lo = base_deg + s_min_degree(p, k, l);
            if lo > max_degree {
                break;
            }
            let fam = MonomialFamily::Product(alloc::vec![
                Factor::Fixed(base.clone()),
                Factor::Z { index: l, lo: 0, hi: p.get() - 2 },
                Factor::Lambda { from: l + 1 },
            ]);
            for m in fam.enumerate(p, max_degree - s_min_degree(p, k, l)) {
                out.push((Block::S(k, l), m));
            }
            l += 1;
        }
        i += 1;
    }
    Ok(out)
}

/// The even-degree part as one chart.
pub fn even_part(p: Prime, max_degree: i64) -> Result<Chart> {
    let mut cores = CoreCharts::new(p);
    let mut chart = Chart::new(p);
    for (block, m) in even_layout(&mut cores, max_degree)? {
        let core = match block {
            Block::A(k) => cores.a(k)?.clone(),
            Block::B(k) => cores.b(k)?.clone(),
            Block::S(..) => unreachable!(),
        };
        chart.direct_sum(&core.tensor_monomial(&m)?)?;
    }
    Ok(chart)
}

/// The odd-degree part as one chart.
pub fn odd_part(p: Prime, max_degree: i64) -> Result<Chart> {
    let mut chart = Chart::new(p);
    for (block, m) in odd_layout(p, max_degree)? {
        let Block::S(k, l) = block else { unreachable!() };
        chart.direct_sum(&build_s(p, k, l)?.tensor_monomial(&m)?)?;
    }
    Ok(chart)
}

/// Shift relating a `B_k` summand to its Pontryagin dual in ku-cohomology:
/// `(B_k^dual)_n` is isomorphic to `B_k` in degree `shift - n`.
pub fn b_duality_shift(p: Prime, k: u32) -> i64 {
    let (pp, k) = (p.p64(), k as i64);
    2 * (pp.pow(k as u32 + 1) + pp.pow(k as u32) + (k + 1) * pp - k + 1)
}

/// Towers `(generator, v-height)` of the associated graded of ku-cohomology
/// (trivial part excluded) whose lowest dot lies in degree `<= max_degree`:
///
/// * `P[y_1] y_0^{p-1} z_0` of height 1 and `P[y_t] z_t` of height `p^t`, `t >= 1`;
/// * `P[y_t] z_t Lambda'_t` of height `p^t - t`, `t >= k0`, with `Lambda'_t`
///   the nonempty monomials of `Lambda_t`;
/// * `q y_1^{i-1} z_{k0+l, l+nu(i)+2} Lambda_{l+nu(i)+2}` of height `nu(i)+2`.
pub fn assoc_graded_towers(p: Prime, max_degree: i64) -> Result<Vec<(Monomial, u32)>> {
    let vd = p.v_degree();
    let mut out = Vec::new();
    let push_family = |factors: Vec<Factor>, h: u32, out: &mut Vec<(Monomial, u32)>| {
        let room = max_degree + vd * (h as i64 - 1);
        for m in MonomialFamily::Product(factors).enumerate(p, room) {
            out.push((m, h));
        }
    };
    let y0z0 = Monomial::y(p, 0, p.get() as u64 - 1).mul(&Monomial::z(0, 1))?;
    push_family(alloc::vec![Factor::Fixed(y0z0), Factor::Y { index: 1, lo: 0, hi: None }], 1, &mut out);
    let mut t = 1;
    while p.checked_pow(t + 1).is_some_and(|x| 2 * x / p.p64() + 2 * p.p64() <= max_degree) {
        let tail = alloc::vec![Factor::Z { index: t, lo: 1, hi: 1 }, Factor::Y { index: t, lo: 0, hi: None }];
        push_family(tail.clone(), height(p, t, 0)?, &mut out);
        if t >= p.k0() {
            let mut f = tail;
            f.push(Factor::LambdaReduced { from: t });
            push_family(f, height(p, t, t)?, &mut out);
        }
        t += 1;
    }
    let mut i: u64 = 1;
    loop {
        let k = nu(p, i)? + 1;
        let base = Monomial::q().mul(&Monomial::y(p, 1, i - 1))?;
        if base.degree(p) > max_degree {
            break;
        }
        let mut l = 0;
        loop {
            let top = l + k + 1;
            if p.checked_pow(top + 1).is_none() {
                break;
            }
            let z = Monomial::zij(p, p.k0() + l, top);
            if base.degree(p) + z.degree(p) - vd * k as i64 > max_degree {
                break;
            }
            push_family(alloc::vec![Factor::Fixed(base.mul(&z)?), Factor::Lambda { from: top },], k + 1, &mut out);
            l += 1;
        }
        i += 1;
    }
    out.sort_by_cached_key(|(m, h)| (m.listing_key(p), *h));
    Ok(out)
}

/// Number of dots in degree `n` of the associated graded.
pub fn assoc_graded_dims(p: Prime, n: i64) -> Result<u64> {
    let vd = p.v_degree();
    let towers = assoc_graded_towers(p, n)?;
    Ok(towers
        .iter()
        .filter(|(m, h)| {
            let d = m.degree(p) - n;
            d >= 0 && d % vd == 0 && d / vd < *h as i64
        })
        .count() as u64)
}
