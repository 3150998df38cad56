//! Mod-p connective K-theory k(1) of K(Z/p, 2): dimensions of its reduced
//! part, the Bockstein comparison with ku, and the accounting of k(1) by
//! kernels and cokernels of multiplication by p on the ku building blocks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::audit::{AuditReport, AuditRow};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::ku::{build_s, s_min_degree, CoreCharts, KuCohomology};
use crate::padic::{HeightSequences, Prime};
use crate::series::PSeries;

/// The odd-degree class `w_j`, `j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WClass {
    pub index: u32,
    pub degree: i64,
}

impl WClass {
    pub fn new(p: Prime, index: u32) -> Result<Self> {
        Ok(WClass { index, degree: w_degree(p, index)? })
    }
}

/// `|w_1| = 2p^2+1`, `|w_2| = 2p^3-2p^2+6p-3`, `w_{j+2} = y_j^{p-1} w_j z_{j+1}^{p-1}`.
pub fn w_degree(p: Prime, j: u32) -> Result<i64> {
    if j == 0 {
        return Err(Error::Unsupported(String::from("w_0 does not exist")));
    }
    if p.checked_pow(j + 2).is_none() {
        return Err(Error::Overflow(format!("|w_{j}| at p={}", p.get())));
    }
    let pp = p.p64();
    let (mut a, mut b) = (2 * pp * pp + 1, 2 * pp * pp * pp - 2 * pp * pp + 6 * pp - 3);
    let mut i = 1;
    while i + 1 < j {
        let next = a + (pp - 1) * p.y_degree(i) + (pp - 1) * p.z_degree(i + 1);
        a = b;
        b = next;
        i += 1;
    }
    Ok(if j == 1 { a } else { b })
}

fn udeg(d: i64) -> usize {
    usize::try_from(d).unwrap_or(usize::MAX)
}

/// `Lambda_j`: monomials in `z_i`, `i >= j`, exponents at most `p-1`.
fn lambda_ps(p: Prime, from: u32, cutoff: usize) -> PSeries {
    let mut s = PSeries::one(cutoff);
    let mut i = from;
    while p.checked_pow(i + 1).is_some_and(|_| udeg(p.z_degree(i)) <= cutoff) {
        s = &s * &PSeries::truncated(cutoff, udeg(p.z_degree(i)), p.get() as usize);
        i += 1;
    }
    s
}

fn poly_ps(degree: i64, cutoff: usize) -> PSeries {
    PSeries::geometric(cutoff, udeg(degree))
}

fn exterior_ps(degree: i64, cutoff: usize) -> PSeries {
    PSeries::from_terms(cutoff, &[(0, 1), (udeg(degree), 1)])
}

/// A family of v-towers of one height whose generators have the given
/// Poincaré series.
struct TowerFamily {
    height: u64,
    gens: PSeries,
}

fn height(h: Option<u64>) -> Result<u64> {
    h.ok_or_else(|| Error::Overflow(String::from("v-height does not fit in 64 bits")))
}

/// How the `z_1` classes enter when `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum K1Reading {
    /// The `z_j`-families (heights `r'(j-1)` and the `z_j^p` line) run over
    /// `j >= k0`, so at `p = 2` the classes `P[y_1] z_1` come only from the
    /// separate height-one line. Identical to `AllFromOne` for odd `p`.
    FromK0,
    /// Every family runs over `j >= 1`; at `p = 2` this counts `z_1` twice
    /// and adds `w_1 z_1` and `z_1^2`, which ku does not support.
    AllFromOne,
}

/// The reduced k(1)-cohomology as families of v-towers that can reach
/// degrees `<= hi`.
fn k1_families(p: Prime, hi: i64, reading: K1Reading) -> Result<Vec<TowerFamily>> {
    let j_min = match reading {
        K1Reading::FromK0 => p.k0(),
        K1Reading::AllFromOne => 1,
    };
    let vd = p.v_degree();
    let pu = p.get() as usize;
    let mut seq = HeightSequences::new(p);
    let mut out = Vec::new();

    let mut j = 1;
    loop {
        if p.checked_pow(j + 4).is_none() {
            break;
        }
        let r = height(seq.r_u64(j))?;
        let rp = height(seq.r_prime_u64(j - 1))?;
        let w = w_degree(p, j)?;
        let bottom1 = w - vd * (r as i64 - 1);
        let bottom2 = p.z_degree(j) - vd * (rp as i64 - 1);
        let bottom4 = p.get() as i64 * p.z_degree(j);
        if bottom1 > hi && bottom2 > hi && bottom4 > hi {
            break;
        }
        if bottom1 <= hi {
            let c = udeg(hi + vd * (r as i64 - 1));
            let mut g = PSeries::monomial(c, udeg(w), 1);
            g = &g * &exterior_ps(w_degree(p, j + 1)?, c);
            g = &g * &PSeries::truncated(c, udeg(p.y_degree(j)), pu - 1);
            g = &g * &poly_ps(p.y_degree(j + 1), c);
            g = &g * &lambda_ps(p, j + 1, c);
            out.push(TowerFamily { height: r, gens: g });
        }
        if bottom2 <= hi && j >= j_min {
            let c = udeg(hi + vd * (rp as i64 - 1));
            let zd = udeg(p.z_degree(j));
            let terms: Vec<(usize, i64)> = (1..pu).map(|e| (e * zd, 1)).collect();
            let mut g = PSeries::from_terms(c, &terms);
            g = &g * &exterior_ps(w, c);
            g = &g * &poly_ps(p.y_degree(j), c);
            g = &g * &lambda_ps(p, j + 1, c);
            out.push(TowerFamily { height: rp, gens: g });
        }
        if bottom4 <= hi && j >= j_min {
            let c = udeg(hi);
            let mut g = PSeries::monomial(c, udeg(bottom4), 1);
            g = &g * &poly_ps(p.y_degree(1), c);
            g = &g * &exterior_ps(p.q_degree(), c);
            g = &g * &lambda_ps(p, j + 1, c);
            out.push(TowerFamily { height: 1, gens: g });
        }
        j += 1;
    }

    let c = udeg(hi.max(0));
    let y0z0 = (p.p64() - 1) * p.y_degree(0) + p.z_degree(0);
    let mut g = &PSeries::monomial(c, udeg(y0z0), 1) * &poly_ps(p.y_degree(1), c);
    if p.get() == 2 {
        g = &g + &(&PSeries::monomial(c, udeg(p.z_degree(1)), 1) * &poly_ps(p.y_degree(1), c));
    }
    out.push(TowerFamily { height: 1, gens: g });
    Ok(out)
}

/// `dim k(1)^n` (trivial summand excluded) for `n` in `lo..=hi`.
pub fn k1_dims(p: Prime, lo: i64, hi: i64) -> Result<Vec<u64>> {
    k1_dims_with(p, lo, hi, K1Reading::FromK0)
}

pub fn k1_dims_with(p: Prime, lo: i64, hi: i64, reading: K1Reading) -> Result<Vec<u64>> {
    if lo > hi {
        return Err(Error::InvalidWindow { from: lo, to: hi });
    }
    let vd = p.v_degree();
    let mut dims = vec![0u64; (hi - lo + 1) as usize];
    for fam in k1_families(p, hi, reading)? {
        let cutoff = fam.gens.cutoff() as i64;
        for (slot, n) in dims.iter_mut().zip(lo..=hi) {
            for b in 0..fam.height as i64 {
                let d = n + vd * b;
                if d > cutoff {
                    break;
                }
                if d >= 0 {
                    *slot += fam.gens.coeff(d as usize) as u64;
                }
            }
        }
    }
    Ok(dims)
}

pub fn k1_dim_at(p: Prime, n: i64) -> Result<u64> {
    Ok(k1_dims(p, n, n)?[0])
}

/// Number of cyclic summands of `ku^n` for `n` in `lo..=hi`; this is both
/// `dim ker(p)` and `dim coker(p)` in that degree.
fn ku_summand_counts(ku: &KuCohomology, lo: i64, hi: i64) -> Result<Vec<u64>> {
    (lo..=hi).map(|n| Ok(ku.group_at(n)?.summand_count() as u64)).collect()
}

/// Checks `dim k(1)^n = dim coker(p | ku^n) + dim ker(p | ku^{n+1})` for
/// every `n <= n_max` from just below the lowest nonzero ku-group.
pub fn bockstein_audit(p: Prime, n_max: i64) -> Result<AuditReport> {
    let ku = KuCohomology::new(p, n_max + 1)?;
    let lo = ku.chart().min_degree().unwrap_or(0).min(1) - 1;
    let counts = ku_summand_counts(&ku, lo, n_max + 1)?;
    let k1 = k1_dims(p, lo, n_max)?;
    let mut report = AuditReport::new("bockstein", p.get());
    for (i, n) in (lo..=n_max).enumerate() {
        report.push(AuditRow::compare(n, k1[i], counts[i] + counts[i + 1]));
    }
    Ok(report)
}

/// A kernel/cokernel family of the long exact sequence of `p` on ku.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GFamily {
    /// `ker(p | A_k)`.
    G1 { k: u32 },
    /// `coker(p | A_k)`.
    G2 { k: u32 },
    /// `ker(p | y_k B_k Z_k^l)`.
    G3 { k: u32, l: u32 },
    /// Extension of `ker(p | q y_1^{p^{k-1}-1} S_{k,l})` by `coker(p | y_k B_k Z_k^l)`.
    G4 { k: u32, l: u32 },
    /// Extension of `ker(p | B_k z_l)` by `coker(p | q y_1^{p^{k-1}-1} S_{k,l})`.
    G5 { k: u32, l: u32 },
    /// `coker(p | B_k z_l)`.
    G6 { k: u32, l: u32 },
    /// `ker(p | B_k z_k^e)`, `1 <= e <= p-2`.
    G7 { k: u32, e: u32 },
    /// `coker(p | B_k z_k^e)`.
    G8 { k: u32, e: u32 },
}

impl GFamily {
    pub fn tag(&self) -> u8 {
        match self {
            GFamily::G1 { .. } => 1,
            GFamily::G2 { .. } => 2,
            GFamily::G3 { .. } => 3,
            GFamily::G4 { .. } => 4,
            GFamily::G5 { .. } => 5,
            GFamily::G6 { .. } => 6,
            GFamily::G7 { .. } => 7,
            GFamily::G8 { .. } => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum BlockKey {
    A(u32),
    B(u32),
    S(u32, u32),
}

/// Which side of `p` a piece contributes: the cokernel in degree `n` or the
/// kernel in degree `n+1`, both landing in `k(1)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Coker,
    Ker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cofactor {
    /// `TP_{p-1}[y_k] P[y_{k+1}]`.
    Y(u32),
    /// `TP_{p-1}[y_k] P[y_{k+1}] TP_{p-1}[z_l] Lambda_{l+1}`.
    Yz(u32, u32),
    /// `P[y_k] Lambda_{k+1}`.
    Pl(u32),
}

struct Piece {
    side: Side,
    block: BlockKey,
    base_degree: i64,
    cofactor: Cofactor,
}

/// Cyclic-summand counts per degree of the ku building blocks, with the
/// cofactor bookkeeping of the kernel/cokernel families. Degrees above
/// `n_max + 1` are never looked at.
pub struct GAccounting {
    prime: Prime,
    n_max: i64,
    cores: CoreCharts,
    counts: BTreeMap<BlockKey, (i64, Vec<u64>)>,
}

impl GAccounting {
    pub fn new(p: Prime, n_max: i64) -> Result<Self> {
        if p.get() == 2 {
            return Err(Error::Unsupported(String::from(
                "the kernel/cokernel family accounting is only set up for odd primes",
            )));
        }
        Ok(GAccounting { prime: p, n_max, cores: CoreCharts::new(p), counts: BTreeMap::new() })
    }

    fn chart(&mut self, key: BlockKey) -> Result<Chart> {
        Ok(match key {
            BlockKey::A(k) => self.cores.a(k)?.clone(),
            BlockKey::B(k) => self.cores.b(k)?.clone(),
            BlockKey::S(k, l) => build_s(self.prime, k, l)?,
        })
    }

    fn block_min(&mut self, key: BlockKey) -> Result<i64> {
        if let BlockKey::S(k, l) = key {
            return Ok(s_min_degree(self.prime, k, l));
        }
        Ok(self.chart(key)?.min_degree().unwrap_or(i64::MAX))
    }

    /// `(lowest degree, counts from there up to n_max + 1)`.
    fn block_counts(&mut self, key: BlockKey) -> Result<&(i64, Vec<u64>)> {
        if !self.counts.contains_key(&key) {
            let chart = self.chart(key)?;
            let lo = chart.min_degree().unwrap_or(0);
            let hi = chart.max_degree().unwrap_or(-1).min(self.n_max + 1);
            let mut v = Vec::new();
            for n in lo..=hi {
                v.push(chart.group_at(n)?.summand_count() as u64);
            }
            self.counts.insert(key, (lo, v));
        }
        Ok(&self.counts[&key])
    }

    fn s_base(&self, k: u32) -> i64 {
        let p = self.prime;
        p.q_degree() + (p.pow(k - 1) - 1) * p.y_degree(1)
    }

    /// `|y_k Z_k^l|`, `Z_k^l = (z_k ... z_{l-1})^{p-1}`.
    fn yz_base(&self, k: u32, l: u32) -> i64 {
        let p = self.prime;
        p.y_degree(k) + (k..l).map(|i| (p.p64() - 1) * p.z_degree(i)).sum::<i64>()
    }

    fn pieces(&self, fam: GFamily) -> Vec<Piece> {
        let p = self.prime;
        let piece = |side, block, base_degree, cofactor| Piece { side, block, base_degree, cofactor };
        match fam {
            GFamily::G1 { k } => vec![piece(Side::Ker, BlockKey::A(k), 0, Cofactor::Y(k))],
            GFamily::G2 { k } => vec![piece(Side::Coker, BlockKey::A(k), 0, Cofactor::Y(k))],
            GFamily::G3 { k, l } => vec![piece(Side::Ker, BlockKey::B(k), self.yz_base(k, l), Cofactor::Yz(k, l))],
            GFamily::G4 { k, l } => vec![
                piece(Side::Coker, BlockKey::B(k), self.yz_base(k, l), Cofactor::Yz(k, l)),
                piece(Side::Ker, BlockKey::S(k, l), self.s_base(k), Cofactor::Yz(k, l)),
            ],
            GFamily::G5 { k, l } => vec![
                piece(Side::Coker, BlockKey::S(k, l), self.s_base(k), Cofactor::Yz(k, l)),
                piece(Side::Ker, BlockKey::B(k), p.z_degree(l), Cofactor::Yz(k, l)),
            ],
            GFamily::G6 { k, l } => vec![piece(Side::Coker, BlockKey::B(k), p.z_degree(l), Cofactor::Yz(k, l))],
            GFamily::G7 { k, e } => vec![piece(Side::Ker, BlockKey::B(k), e as i64 * p.z_degree(k), Cofactor::Pl(k))],
            GFamily::G8 { k, e } => vec![piece(Side::Coker, BlockKey::B(k), e as i64 * p.z_degree(k), Cofactor::Pl(k))],
        }
    }

    fn cofactor_ps(&self, c: Cofactor, cutoff: usize) -> PSeries {
        let p = self.prime;
        let pu = p.get() as usize;
        match c {
            Cofactor::Y(k) => {
                &PSeries::truncated(cutoff, udeg(p.y_degree(k)), pu - 1) * &poly_ps(p.y_degree(k + 1), cutoff)
            }
            Cofactor::Yz(k, l) => {
                let y = self.cofactor_ps(Cofactor::Y(k), cutoff);
                let z = &PSeries::truncated(cutoff, udeg(p.z_degree(l)), pu - 1) * &lambda_ps(p, l + 1, cutoff);
                &y * &z
            }
            Cofactor::Pl(k) => &poly_ps(p.y_degree(k), cutoff) * &lambda_ps(p, k + 1, cutoff),
        }
    }

    /// `dim G^n` for `n` in `lo..=n_max`.
    pub fn dims(&mut self, fam: GFamily, lo: i64) -> Result<Vec<u64>> {
        self.side_dims(fam, lo, None)
    }

    /// Cyclic-summand counts in degrees `lo..=n_max` of the block copies
    /// whose cokernel feeds `fam`. Every block copy occurs in exactly one
    /// family this way, so the sum over all families is the summand count
    /// of ku itself.
    pub fn coker_block_counts(&mut self, fam: GFamily, lo: i64) -> Result<Vec<u64>> {
        self.side_dims(fam, lo, Some(Side::Coker))
    }

    fn side_dims(&mut self, fam: GFamily, lo: i64, only: Option<Side>) -> Result<Vec<u64>> {
        let n_max = self.n_max;
        let mut out = vec![0u64; (n_max - lo + 1).max(0) as usize];
        for pc in self.pieces(fam) {
            if only.is_some_and(|s| s != pc.side) {
                continue;
            }
            let cof_room = n_max + 1 - self.block_min(pc.block)? - pc.base_degree;
            if cof_room < 0 {
                continue;
            }
            let cof = self.cofactor_ps(pc.cofactor, udeg(cof_room));
            let (blo, counts) = self.block_counts(pc.block)?.clone();
            for (i, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (d, &m) in cof.coeffs().iter().enumerate() {
                    if m == 0 {
                        continue;
                    }
                    let t = blo + i as i64 + pc.base_degree + d as i64;
                    let n = if pc.side == Side::Ker { t - 1 } else { t };
                    if n >= lo && n <= n_max {
                        out[(n - lo) as usize] += c * m as u64;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Every family with some piece in degrees `<= n_max + 1`.
    pub fn families(&mut self) -> Result<Vec<GFamily>> {
        let p = self.prime;
        let bound = self.n_max + 1;
        let mut out = Vec::new();
        let mut k = 1;
        while p.checked_pow(k + 3).is_some() {
            let a_min = self.block_min(BlockKey::A(k))?;
            let b_min = self.block_min(BlockKey::B(k))?;
            let s_min = self.s_base(k) + s_min_degree(p, k, k + 1);
            if a_min > bound && b_min > bound && s_min > bound {
                break;
            }
            if a_min <= bound {
                out.push(GFamily::G1 { k });
                out.push(GFamily::G2 { k });
            }
            let mut l = k + 1;
            while p.checked_pow(l + 2).is_some() {
                let lows = [b_min + self.yz_base(k, l), self.s_base(k) + s_min_degree(p, k, l), b_min + p.z_degree(l)];
                if lows.iter().all(|&x| x > bound) {
                    break;
                }
                out.extend([GFamily::G3 { k, l }, GFamily::G4 { k, l }, GFamily::G5 { k, l }, GFamily::G6 { k, l }]);
                l += 1;
            }
            for e in 1..p.get() - 1 {
                if b_min + e as i64 * p.z_degree(k) <= bound {
                    out.push(GFamily::G7 { k, e });
                    out.push(GFamily::G8 { k, e });
                }
            }
            k += 1;
        }
        Ok(out)
    }
}

/// `dim` of one family in degree `n`, odd `p` only.
pub fn g_family_dim(p: Prime, fam: GFamily, n: i64) -> Result<u64> {
    let mut acc = GAccounting::new(p, n)?;
    Ok(acc.dims(fam, n)?[0])
}

/// Checks that the kernel/cokernel families add up to `k(1)` degree by
/// degree for `n <= n_max`, odd `p` only.
pub fn family_accounting_audit(p: Prime, n_max: i64) -> Result<AuditReport> {
    let mut acc = GAccounting::new(p, n_max)?;
    let lo = 0;
    let mut total = vec![0u64; (n_max - lo + 1) as usize];
    for fam in acc.families()? {
        for (t, d) in total.iter_mut().zip(acc.dims(fam, lo)?) {
            *t += d;
        }
    }
    let k1 = k1_dims(p, lo, n_max)?;
    let mut report = AuditReport::new("families", p.get());
    for (i, n) in (lo..=n_max).enumerate() {
        report.push(AuditRow::compare(n, total[i], k1[i]));
    }
    Ok(report)
}
