//! The Adams spectral sequence for ku-cohomology of K(Z/p, 2): the E_2 term
//! as a sum of v-towers, the four families of differentials per parity, page
//! by page homology, and the source/target matching audit.
//!
//! E_2 (reduced, trivial summand excluded) is the sum of
//!
//! * MAIN: `P[v, y_1] ⊗ E[q] ⊗ W_j ⊗ TP_{p-1}[z_j] ⊗ Λ_{j+1}`, `j >= k0`,
//!   v-towers based at filtration 0;
//! * H0TOWER: `P[h_0, v, y_1] ⊗ E[v^{k0} q]`, without the unit;
//! * SPECIAL: `P[y_1] y_0^{p-1} z_0` (odd p) or `P[y_1] ⟨y_0 z_0, z_1, v z_1⟩` (p = 2).
//!
//! A MAIN generator is `y_1^i q^ε Z` where the lowest z-index `a` of `Z` is at
//! least `k0`, `z_a` has exponent `1..=p` and every other `z` exponent is at
//! most `p - 1`; then `Z = z_{a,j} z_j^e λ` for a unique `j`, `e <= p - 2`,
//! `λ ∈ Λ_{j+1}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::padic::{nu, Prime};

/// Which summand of E_2 a tower belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TowerKind {
    Main,
    H0Tower,
    Special,
}

impl TowerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TowerKind::Main => "main",
            TowerKind::H0Tower => "h0tower",
            TowerKind::Special => "special",
        }
    }
}

/// A v-tower of E_2 with generator `h_0^h0 v^v0 gen`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E2Tower {
    pub kind: TowerKind,
    pub gen: Monomial,
    pub h0: u32,
    pub v0: u32,
    /// Number of classes; `None` for an infinite tower.
    pub height: Option<u32>,
    /// Codegree of the generator.
    pub degree: i64,
    /// Filtration of the generator.
    pub filtration: u32,
}

impl E2Tower {
    fn new(p: Prime, kind: TowerKind, gen: Monomial, h0: u32, v0: u32, height: Option<u32>) -> Self {
        let degree = gen.degree(p) - p.v_degree() * v0 as i64;
        E2Tower { kind, gen, h0, v0, height, degree, filtration: h0 + v0 }
    }

    fn key(&self) -> TowerKey {
        (self.kind, self.gen.clone(), self.h0)
    }

    /// Text form of `v^level` times the generator.
    pub fn label(&self, p: Prime, level: u32) -> String {
        let mut s = String::new();
        match self.h0 {
            0 => {}
            1 => s.push_str("h0 "),
            a => s.push_str(&format!("h0^{a} ")),
        }
        match self.v0 + level {
            0 => {}
            1 => s.push_str("v "),
            b => s.push_str(&format!("v^{b} ")),
        }
        s.push_str(&self.gen.render(p));
        s
    }
}

type TowerKey = (TowerKind, Monomial, u32);

/// Decomposition `Z = z_{a,j} z_j^e λ` of a MAIN z-part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainShape {
    pub a: u32,
    pub j: u32,
    pub e: u32,
    pub lambda: Monomial,
}

/// The MAIN decomposition of a z-monomial, if it has one.
pub fn main_shape(p: Prime, z: &Monomial) -> Option<MainShape> {
    let exps = z.z_exponents();
    let a = z.min_z_index()?;
    if a < p.k0() {
        return None;
    }
    let pm = p.get();
    let lead = exps[a as usize];
    if lead == 0 || lead > pm || exps[a as usize + 1..].iter().any(|&e| e > pm - 1) {
        return None;
    }
    let j = if lead < pm {
        a
    } else {
        let mut j = a + 1;
        while z.z_exponent(j) == pm - 1 {
            j += 1;
        }
        j
    };
    let head = Monomial::zij(p, a, j);
    let rest = z.div(&head)?;
    let e = rest.z_exponent(j);
    let lambda = rest.div(&Monomial::z(j, e))?;
    Some(MainShape { a, j, e, lambda })
}

/// All MAIN z-parts of degree at most `max_degree`, unsorted.
fn main_z_parts(p: Prime, max_degree: i64) -> Vec<Monomial> {
    let pm = p.get();
    let mut out = Vec::new();
    let mut a = p.k0();
    while p.z_degree(a) <= max_degree {
        for lead in 1..=pm {
            let base = Monomial::z(a, lead);
            if base.degree(p) > max_degree {
                break;
            }
            // higher z factors with exponents below p
            let mut stack = vec![(a + 1, base)];
            while let Some((k, m)) = stack.pop() {
                if p.checked_pow(k + 1).is_none() || m.degree(p) + p.z_degree(k) > max_degree {
                    out.push(m);
                    continue;
                }
                for e in 0..pm {
                    let next = m.mul(&Monomial::z(k, e)).unwrap_or_else(|_| m.clone());
                    if next.degree(p) > max_degree {
                        break;
                    }
                    stack.push((k + 1, next));
                }
            }
        }
        a += 1;
    }
    out
}

/// All E_2 v-towers whose generator has codegree at most `max_degree` and
/// filtration at most `s_max`.
pub fn e2_towers(p: Prime, max_degree: i64, s_max: u32) -> Vec<E2Tower> {
    let k0 = p.k0();
    let mut out = Vec::new();
    let y1 = |i: u64| Monomial::y(p, 1, i);
    let yd = p.y_degree(1);
    for z in main_z_parts(p, max_degree) {
        for qe in [false, true] {
            let base = if qe { z.mul(&Monomial::q()).unwrap_or_else(|_| z.clone()) } else { z.clone() };
            let mut i = 0u64;
            while base.degree(p) + yd * i as i64 <= max_degree {
                let gen = base.mul(&y1(i)).unwrap_or_else(|_| base.clone());
                out.push(E2Tower::new(p, TowerKind::Main, gen, 0, 0, None));
                i += 1;
            }
        }
    }
    let vd = p.v_degree();
    for a in 0..=s_max {
        let mut i = 1u64;
        while yd * i as i64 <= max_degree {
            out.push(E2Tower::new(p, TowerKind::H0Tower, y1(i), a, 0, None));
            i += 1;
        }
        if a + k0 <= s_max {
            let mut i = 0u64;
            while p.q_degree() - vd * k0 as i64 + yd * i as i64 <= max_degree {
                let gen = Monomial::q().mul(&y1(i)).unwrap_or_else(|_| Monomial::q());
                out.push(E2Tower::new(p, TowerKind::H0Tower, gen, a, k0, None));
                i += 1;
            }
        }
    }
    let special: Vec<(Monomial, u32)> = if p.get() == 2 {
        vec![(Monomial::y(p, 0, 1).mul(&Monomial::z(0, 1)).unwrap_or_default(), 1), (Monomial::z(1, 1), 2)]
    } else {
        vec![(Monomial::y(p, 0, p.get() as u64 - 1).mul(&Monomial::z(0, 1)).unwrap_or_default(), 1)]
    };
    for (m, h) in special {
        let mut i = 0u64;
        while m.degree(p) + yd * i as i64 <= max_degree {
            let gen = m.mul(&y1(i)).unwrap_or_else(|_| m.clone());
            out.push(E2Tower::new(p, TowerKind::Special, gen, 0, 0, Some(h)));
            i += 1;
        }
    }
    out.sort_by_cached_key(|t| (t.degree, t.filtration, t.kind, t.gen.listing_key(p), t.h0));
    out
}

/// Closed-form dimensions of reduced E_2 at `(n, s)`, trivial summand excluded.
pub fn e2_dims(p: Prime, n_hi: i64, s_max: u32) -> BTreeMap<(i64, u32), usize> {
    let vd = p.v_degree();
    let mut out = BTreeMap::new();
    for t in e2_towers(p, n_hi + vd * s_max as i64, s_max) {
        let mut b = 0u32;
        while t.filtration + b <= s_max && t.height.is_none_or(|h| b < h) {
            let n = t.degree - vd * b as i64;
            if n <= n_hi {
                *out.entry((n, t.filtration + b)).or_insert(0) += 1;
            }
            b += 1;
        }
    }
    out
}

/// Which of the four families of differentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// `d(y_1^i) = h_0^{ν(i)[+1]} v^{k0} q y_1^{i-1}`.
    YPower,
    /// `d(y_1^i z_j M) = v^{ν(i)+2} q y_1^{i-1} z_{j-ν(i)[-1], j} M`.
    YZ,
    /// `d(h_0^{t-k0} v^{k0} q y_1^{p^{t-1}-1} M) = v^{p^t} z_t M`.
    QTower,
    /// `d(q y_1^{p^{t-1}-1} z_{j-t+k0... , j} M) = v^{p^t - t} z_t z_j M`.
    QZ,
}

impl Family {
    pub fn index(self) -> u32 {
        match self {
            Family::YPower => 1,
            Family::YZ => 2,
            Family::QTower => 3,
            Family::QZ => 4,
        }
    }
}

/// `d_r(v^b source) = v^{b + shift} target` as predicted for one source tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub family: Family,
    pub r: u32,
    pub target_kind: TowerKind,
    pub target_gen: Monomial,
    pub target_h0: u32,
    pub shift: u32,
}

/// The differential supported by a tower, if it is a source.
pub fn predicted_differential(p: Prime, t: &E2Tower) -> Result<Option<Prediction>> {
    let pm = p.get() as u64;
    let odd = u32::from(pm != 2);
    let i = t.gen.y0_exponent() / pm;
    let y1 = |e: u64| Monomial::y(p, 1, e);
    match t.kind {
        TowerKind::Special => Ok(None),
        TowerKind::H0Tower if !t.gen.has_q() => {
            let v = nu(p, i)?;
            let target = Monomial::q().mul(&y1(i - 1))?;
            Ok(Some(Prediction {
                family: Family::YPower,
                r: v + 2,
                target_kind: TowerKind::H0Tower,
                target_gen: target,
                target_h0: t.h0 + v + odd,
                shift: 0,
            }))
        }
        TowerKind::H0Tower => {
            // h0^{t - 2 + odd} v^{k0} q y_1^i with p^{t-1} | i + 1
            let tt = t.h0 + 2 - odd;
            let Some(block) = p.checked_pow(tt - 1).map(|b| b as u64) else {
                return Ok(None);
            };
            if (i + 1) % block != 0 {
                return Ok(None);
            }
            let target = Monomial::z(tt, 1).mul(&y1(i + 1 - block))?;
            Ok(Some(Prediction {
                family: Family::QTower,
                r: (p.pow(tt) - tt as i64) as u32,
                target_kind: TowerKind::Main,
                target_gen: target,
                target_h0: 0,
                shift: p.pow(tt) as u32,
            }))
        }
        TowerKind::Main => {
            let z = t.gen.z_part();
            let shape = main_shape(p, &z)
                .ok_or_else(|| Error::Integrity(format!("{} is not a MAIN generator", t.gen.render(p))))?;
            if !t.gen.has_q() {
                if i == 0 {
                    return Ok(None);
                }
                let v = nu(p, i)?;
                let l = shape.a;
                if l < v + 2 {
                    return Ok(None);
                }
                let zl = Monomial::z(l, 1);
                let rest = z.div(&zl).ok_or_else(|| Error::Integrity("lowest z factor missing".into()))?;
                let target = Monomial::q().mul(&y1(i - 1))?.mul(&Monomial::zij(p, l - v - odd, l))?.mul(&rest)?;
                return Ok(Some(Prediction {
                    family: Family::YZ,
                    r: v + 2,
                    target_kind: TowerKind::Main,
                    target_gen: target,
                    target_h0: 0,
                    shift: v + 2,
                }));
            }
            // q y_1^i z_{a,j} M with t = j - a + 2 - odd and p^{t-1} | i + 1
            let tt = shape.j - shape.a + 2 - odd;
            let Some(block) = p.checked_pow(tt - 1).map(|b| b as u64) else {
                return Ok(None);
            };
            if (i + 1) % block != 0 {
                return Ok(None);
            }
            let rest =
                z.div(&Monomial::zij(p, shape.a, shape.j)).ok_or_else(|| Error::Integrity("z_{a,j} missing".into()))?;
            let target = Monomial::z(tt, 1).mul(&Monomial::z(shape.j, 1))?.mul(&rest)?.mul(&y1(i + 1 - block))?;
            let r = (p.pow(tt) - tt as i64) as u32;
            Ok(Some(Prediction {
                family: Family::QZ,
                r,
                target_kind: TowerKind::Main,
                target_gen: target,
                target_h0: 0,
                shift: r,
            }))
        }
    }
}

/// One applied differential between two towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppliedDifferential {
    pub r: u32,
    pub family: Family,
    pub source: usize,
    pub target: usize,
    pub shift: u32,
    pub source_label: String,
    pub target_label: String,
}

/// A page of the spectral sequence restricted to a window.
///
/// Classes are `(tower, level)`; a class is in the window when its codegree
/// lies in `n_lo..=n_hi` and its filtration is at most `s_max`.
#[derive(Debug, Clone)]
pub struct BigradedPage {
    prime: Prime,
    page: u32,
    n_lo: i64,
    n_hi: i64,
    s_max: u32,
    towers: Vec<E2Tower>,
    index: BTreeMap<TowerKey, usize>,
    /// Per tower: first level in the window and liveness of the following levels.
    alive: Vec<(u32, Vec<bool>)>,
}

impl BigradedPage {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn page(&self) -> u32 {
        self.page
    }

    pub fn window(&self) -> (i64, i64, u32) {
        (self.n_lo, self.n_hi, self.s_max)
    }

    pub fn towers(&self) -> &[E2Tower] {
        &self.towers
    }

    fn in_window(&self, t: &E2Tower, level: u32) -> bool {
        let n = t.degree - self.prime.v_degree() * level as i64;
        n >= self.n_lo && n <= self.n_hi && t.filtration + level <= self.s_max && t.height.is_none_or(|h| level < h)
    }

    /// Whether `(tower, level)` is in the window and still alive.
    pub fn is_alive(&self, tower: usize, level: u32) -> bool {
        let (first, flags) = &self.alive[tower];
        level >= *first && flags.get((level - first) as usize).copied().unwrap_or(false)
    }

    fn kill(&mut self, tower: usize, level: u32) {
        let (first, flags) = &mut self.alive[tower];
        flags[(level - *first) as usize] = false;
    }

    /// Live levels of a tower.
    pub fn live_levels(&self, tower: usize) -> impl Iterator<Item = u32> + '_ {
        let (first, flags) = &self.alive[tower];
        flags.iter().enumerate().filter(|(_, &a)| a).map(move |(k, _)| first + k as u32)
    }

    /// Dimensions of the page by `(codegree, filtration)`.
    pub fn dims(&self) -> BTreeMap<(i64, u32), usize> {
        let vd = self.prime.v_degree();
        let mut out = BTreeMap::new();
        for (ti, t) in self.towers.iter().enumerate() {
            for b in self.live_levels(ti) {
                *out.entry((t.degree - vd * b as i64, t.filtration + b)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Labels of the live classes at `(n, s)`.
    pub fn basis(&self, n: i64, s: u32) -> Vec<String> {
        let vd = self.prime.v_degree();
        let mut out = Vec::new();
        for (ti, t) in self.towers.iter().enumerate() {
            if s < t.filtration {
                continue;
            }
            let b = s - t.filtration;
            if t.degree - vd * b as i64 == n && self.is_alive(ti, b) {
                out.push(t.label(self.prime, b));
            }
        }
        out
    }

    pub fn find(&self, kind: TowerKind, gen: &Monomial, h0: u32) -> Option<usize> {
        self.index.get(&(kind, gen.clone(), h0)).copied()
    }
}

/// E_2 restricted to codegrees `n_lo..=n_hi` and filtrations `0..=s_max`.
pub fn e2_window(p: Prime, n_lo: i64, n_hi: i64, s_max: u32) -> Result<BigradedPage> {
    if n_lo > n_hi {
        return Err(Error::InvalidWindow { from: n_lo, to: n_hi });
    }
    let vd = p.v_degree();
    let towers: Vec<E2Tower> = e2_towers(p, n_hi + vd * s_max as i64, s_max);
    let mut page = BigradedPage {
        prime: p,
        page: 2,
        n_lo,
        n_hi,
        s_max,
        towers: Vec::new(),
        index: BTreeMap::new(),
        alive: Vec::new(),
    };
    for t in towers {
        let mut first = None;
        let mut flags = Vec::new();
        let mut b = 0u32;
        while t.filtration + b <= s_max && t.height.is_none_or(|h| b < h) {
            let inside = page.in_window(&t, b);
            if inside && first.is_none() {
                first = Some(b);
            }
            if first.is_some() {
                if !inside {
                    break;
                }
                flags.push(true);
            }
            b += 1;
        }
        if let Some(f) = first {
            page.index.insert(t.key(), page.towers.len());
            page.towers.push(t);
            page.alive.push((f, flags));
        }
    }
    Ok(page)
}

/// Window discipline for comparing E_∞ on codegrees `<= n_hi` and
/// filtrations `<= s_check`: the longest differential touching that zone.
pub fn r_max(p: Prime, n_hi: i64, s_check: u32) -> u32 {
    let vd = p.v_degree();
    let mut t = 1u32;
    let mut r = 2u32;
    // z_t towers reach codegree 2(p^{t+1}+1) - vd * s at filtration s
    while p.checked_pow(t + 1).is_some_and(|x| 2 * (x + 1) - vd * (s_check as i64 + p.pow(t)) <= n_hi) {
        r = r.max((p.pow(t) - t as i64) as u32);
        t += 1;
    }
    // the y-power differentials have length nu(i) + 2 <= log_p(n) + 2
    let mut v = 0u32;
    while p.checked_pow(v + 1).is_some_and(|x| p.y_degree(1) * x <= n_hi + vd * (s_check as i64 + 64)) {
        v += 1;
    }
    r.max(v + 2)
}

/// The outcome of running all differentials on a window.
#[derive(Debug, Clone)]
pub struct SpectralSequenceRun {
    pub e_infinity: BigradedPage,
    pub differentials: Vec<AppliedDifferential>,
    /// Filtrations up to this bound are unaffected by the window edge.
    pub trusted_s: u32,
    pub trusted_n: (i64, i64),
}

impl SpectralSequenceRun {
    /// E_∞ dimensions restricted to the trusted zone.
    pub fn trusted_dims(&self) -> BTreeMap<(i64, u32), usize> {
        let (lo, hi) = self.trusted_n;
        self.e_infinity.dims().into_iter().filter(|((n, s), _)| *n >= lo && *n <= hi && *s <= self.trusted_s).collect()
    }
}

/// Runs `d_2, d_3, ...` on `page` through `d_{r_top}`.
///
/// A class whose differential would leave the window is kept; the caller
/// trusts only filtrations `<= s_max - r_top` and codegrees one inside the
/// window on each side. A predicted target that is missing from the page in
/// the trusted zone is an error.
pub fn run_differentials(mut page: BigradedPage, r_top: u32) -> Result<SpectralSequenceRun> {
    let p = page.prime;
    let vd = p.v_degree();
    let mut by_page: BTreeMap<u32, Vec<(usize, Prediction)>> = BTreeMap::new();
    for (ti, t) in page.towers.iter().enumerate() {
        if let Some(pred) = predicted_differential(p, t)? {
            by_page.entry(pred.r).or_default().push((ti, pred));
        }
    }
    let trusted_s = page.s_max.saturating_sub(r_top);
    let trusted_n = (page.n_lo + 1, page.n_hi - 1);
    let trusted = |t: &E2Tower, b: u32| {
        let n = t.degree - vd * b as i64;
        n >= trusted_n.0 && n <= trusted_n.1 && t.filtration + b <= trusted_s
    };
    let mut applied = Vec::new();
    for r in 2..=r_top {
        page.page = r;
        let Some(list) = by_page.get(&r) else { continue };
        let mut hits: Vec<(usize, u32, usize, u32)> = Vec::new();
        for (src, pred) in list {
            let target = page.find(pred.target_kind, &pred.target_gen, pred.target_h0);
            let st = &page.towers[*src];
            let levels: Vec<u32> = page.live_levels(*src).collect();
            let mut any = false;
            for b in levels {
                let tl = b + pred.shift;
                let found = target.filter(|&ti| page.is_alive(ti, tl));
                match found {
                    Some(ti) => {
                        hits.push((*src, b, ti, tl));
                        any = true;
                    }
                    None if trusted(st, b) => {
                        let tt = E2Tower::new(p, pred.target_kind, pred.target_gen.clone(), pred.target_h0, 0, None);
                        return Err(Error::MissingTarget(format!(
                            "d_{r}({}) = {} is not on page {r}",
                            st.label(p, b),
                            tt.label(p, tl)
                        )));
                    }
                    None => {}
                }
            }
            if any {
                if let Some(ti) = target {
                    applied.push(AppliedDifferential {
                        r,
                        family: pred.family,
                        source: *src,
                        target: ti,
                        shift: pred.shift,
                        source_label: st.label(p, 0),
                        target_label: page.towers[ti].label(p, pred.shift),
                    });
                }
            }
        }
        // a class may not be both a source and a target, nor be hit twice
        let mut seen: BTreeMap<(usize, u32), usize> = BTreeMap::new();
        for &(s, b, t, l) in &hits {
            *seen.entry((t, l)).or_insert(0) += 1;
            if seen.contains_key(&(s, b)) {
                return Err(Error::InconsistentDifferentials(format!(
                    "{} is both a source and a target of d_{r}",
                    page.towers[s].label(p, b)
                )));
            }
        }
        for &(s, b, _, _) in &hits {
            if seen.contains_key(&(s, b)) {
                return Err(Error::InconsistentDifferentials(format!(
                    "{} is both a source and a target of d_{r}",
                    page.towers[s].label(p, b)
                )));
            }
        }
        if let Some(((t, l), _)) = seen.iter().find(|(_, &c)| c > 1) {
            return Err(Error::InconsistentDifferentials(format!(
                "{} is hit by more than one d_{r}",
                page.towers[*t].label(p, *l)
            )));
        }
        for (s, b, t, l) in hits {
            page.kill(s, b);
            page.kill(t, l);
        }
    }
    Ok(SpectralSequenceRun { e_infinity: page, differentials: applied, trusted_s, trusted_n })
}

/// E_∞ on codegrees `<= n_hi`, filtrations `<= s_check`, with the padding
/// chosen by [`r_max`].
pub fn e_infinity(p: Prime, n_hi: i64, s_check: u32) -> Result<SpectralSequenceRun> {
    let r = r_max(p, n_hi, s_check);
    let n_lo = -p.v_degree() * s_check as i64;
    let page = e2_window(p, n_lo - 1, n_hi + 1, s_check + r)?;
    run_differentials(page, r)
}

/// One tower's role count in the matching audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingEntry {
    pub label: String,
    pub as_source: u32,
    pub as_target: u32,
}

/// Towers of MAIN and H0TOWER meeting the trusted zone that are not
/// involved in exactly one differential.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchingReport {
    pub towers_checked: usize,
    pub orphans: Vec<MatchingEntry>,
    pub doubles: Vec<MatchingEntry>,
}

impl MatchingReport {
    pub fn pass(&self) -> bool {
        self.orphans.is_empty() && self.doubles.is_empty()
    }
}

/// Checks that each infinite E_2 tower meeting codegrees `<= n_hi` at
/// filtrations `<= s_check` is a source or a target of exactly one
/// differential across the four families.
pub fn matching_audit(p: Prime, n_hi: i64, s_check: u32) -> Result<MatchingReport> {
    let r = r_max(p, n_hi, s_check);
    let n_lo = -p.v_degree() * s_check as i64;
    let page = e2_window(p, n_lo - 1, n_hi + 1, s_check + r)?;
    let n = page.towers.len();
    let mut source = vec![0u32; n];
    let mut target = vec![0u32; n];
    for (ti, t) in page.towers.iter().enumerate() {
        if let Some(pred) = predicted_differential(p, t)? {
            source[ti] += 1;
            if let Some(tj) = page.find(pred.target_kind, &pred.target_gen, pred.target_h0) {
                target[tj] += 1;
            }
        }
    }
    let vd = p.v_degree();
    let mut report = MatchingReport::default();
    for (ti, t) in page.towers.iter().enumerate() {
        if t.kind == TowerKind::Special {
            continue;
        }
        let meets = page.live_levels(ti).any(|b| {
            t.degree - vd * b as i64 <= n_hi && t.degree - vd * (b as i64) >= n_lo && t.filtration + b <= s_check
        });
        if !meets {
            continue;
        }
        report.towers_checked += 1;
        let entry = MatchingEntry { label: t.label(p, 0), as_source: source[ti], as_target: target[ti] };
        match source[ti] + target[ti] {
            0 => report.orphans.push(entry),
            1 => {}
            _ => report.doubles.push(entry),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn main_shapes() {
        let two = p(2);
        let s = main_shape(two, &Monomial::zij(two, 2, 5)).unwrap();
        assert_eq!((s.a, s.j, s.e), (2, 5, 0));
        let m = Monomial::z(3, 1).mul(&Monomial::z(4, 1)).unwrap();
        let s = main_shape(two, &m).unwrap();
        assert_eq!((s.a, s.j, s.lambda), (3, 3, Monomial::z(4, 1)));
        assert!(main_shape(two, &Monomial::z(1, 1)).is_none());
        assert!(main_shape(two, &Monomial::z(2, 1).mul(&Monomial::z(3, 2)).unwrap()).is_none());
        let three = p(3);
        let s = main_shape(three, &Monomial::z(1, 2)).unwrap();
        assert_eq!((s.a, s.j, s.e), (1, 1, 1));
        let s = main_shape(three, &Monomial::z(1, 3).mul(&Monomial::z(2, 1)).unwrap()).unwrap();
        assert_eq!((s.a, s.j, s.e), (1, 2, 1));
    }

    #[test]
    fn first_differentials() {
        let two = p(2);
        let y1 = E2Tower::new(two, TowerKind::H0Tower, Monomial::y(two, 1, 1), 0, 0, None);
        let d = predicted_differential(two, &y1).unwrap().unwrap();
        assert_eq!((d.r, d.target_h0), (2, 0));
        assert_eq!(d.target_gen, Monomial::q());
        let y2 = E2Tower::new(two, TowerKind::H0Tower, Monomial::y(two, 1, 2), 0, 0, None);
        let d = predicted_differential(two, &y2).unwrap().unwrap();
        assert_eq!((d.r, d.target_h0), (3, 1));
    }
}
