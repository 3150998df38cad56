//! Smith normal form over `Z/p^E`.
//!
//! A finite abelian p-group killed by `p^E` is presented as the cokernel of a
//! relation matrix over `Z/p^E`; that ring is local, so elimination with a
//! pivot of minimal valuation always succeeds and entries never grow.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Arithmetic modulo `p^e`, with `p^e < 2^63` so products fit in `u128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModPow {
    p: u64,
    e: u32,
    modulus: u128,
}

impl ModPow {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        let modulus = (p as u128)
            .checked_pow(e)
            .filter(|&m| m < (1u128 << 63))
            .ok_or_else(|| Error::Overflow(format!("{p}^{e} exceeds the SNF modulus limit")))?;
        Ok(ModPow { p, e, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn reduce_i128(&self, x: i128) -> u128 {
        x.rem_euclid(self.modulus as i128) as u128
    }

    pub fn add(&self, a: u128, b: u128) -> u128 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u128, b: u128) -> u128 {
        (a + self.modulus - b) % self.modulus
    }

    pub fn mul(&self, a: u128, b: u128) -> u128 {
        (a * b) % self.modulus
    }

    /// Valuation of `a` as an element of `Z/p^e`; `e` for zero.
    pub fn valuation(&self, a: u128) -> u32 {
        if a == 0 {
            return self.e;
        }
        let mut a = a;
        let mut k = 0;
        while a % self.p as u128 == 0 {
            a /= self.p as u128;
            k += 1;
        }
        k
    }

    /// Inverse of a unit.
    pub fn inverse(&self, a: u128) -> u128 {
        let m = self.modulus as i128;
        let (mut r0, mut r1) = (m, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "inverse of a non-unit");
        self.reduce_i128(t0)
    }

    pub fn pow_p(&self, k: u32) -> u128 {
        if k >= self.e {
            0
        } else {
            (self.p as u128).pow(k)
        }
    }
}

/// Cyclic decomposition of `(Z/p^E)^n / rowspace(R)` together with the
/// change of basis.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Exponent of each cyclic summand, in basis order; zero exponents are kept.
    pub exponents: Vec<u32>,
    /// `y = x * basis` maps generator coordinates to cyclic coordinates.
    pub basis: Vec<Vec<u128>>,
    /// Rows are the cyclic generators written in generator coordinates.
    pub basis_inv: Vec<Vec<u128>>,
}

/// Exponents of the nontrivial cyclic summands of `(Z/p^E)^ncols / rowspace(rows)`, sorted.
pub fn cokernel_exponents(ring: ModPow, rows: Vec<Vec<u128>>, ncols: usize) -> Vec<u32> {
    let mut exps = eliminate(ring, rows, ncols, None);
    exps.retain(|&e| e > 0);
    exps.sort_unstable();
    exps
}

/// Full decomposition with transforms.
pub fn decompose(ring: ModPow, rows: Vec<Vec<u128>>, ncols: usize) -> Decomposition {
    let mut basis = identity(ncols);
    let mut basis_inv = identity(ncols);
    let exponents = eliminate(ring, rows, ncols, Some((&mut basis, &mut basis_inv)));
    Decomposition { exponents, basis, basis_inv }
}

fn identity(n: usize) -> Vec<Vec<u128>> {
    (0..n)
        .map(|i| {
            let mut r = vec![0u128; n];
            r[i] = 1;
            r
        })
        .collect()
}

type Transforms<'a> = Option<(&'a mut Vec<Vec<u128>>, &'a mut Vec<Vec<u128>>)>;

fn eliminate(ring: ModPow, mut a: Vec<Vec<u128>>, ncols: usize, mut tr: Transforms<'_>) -> Vec<u32> {
    for row in a.iter_mut() {
        debug_assert_eq!(row.len(), ncols);
        for x in row.iter_mut() {
            *x %= ring.modulus;
        }
    }
    let nrows = a.len();
    let mut exps = vec![ring.e; ncols];
    let mut t = 0;
    while t < nrows.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = ring.valuation(x);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((k, pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if let Some((v, vinv)) = tr.as_mut() {
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
                vinv.swap(t, pj);
            }
        }
        let pk = ring.pow_p(k);
        let unit = (a[t][t] / pk) % ring.modulus;
        let uinv = ring.inverse(unit);
        for x in a[t].iter_mut() {
            *x = ring.mul(*x, uinv);
        }
        // a[t][t] == p^k now
        let pivot_row = a[t].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == t || row[t] == 0 {
                continue;
            }
            let c = row[t] / pk;
            for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                if y != 0 {
                    *x = ring.sub(*x, ring.mul(c, y));
                }
            }
        }
        for j in (t + 1)..ncols {
            let x = a[t][j];
            if x == 0 {
                continue;
            }
            let c = x / pk;
            // col_j -= c * col_t; only row t has a nonzero entry in column t
            a[t][j] = 0;
            if let Some((v, vinv)) = tr.as_mut() {
                for row in v.iter_mut() {
                    let s = row[t];
                    if s != 0 {
                        row[j] = ring.sub(row[j], ring.mul(c, s));
                    }
                }
                let (lo, hi) = vinv.split_at_mut(j);
                for (x, &y) in lo[t].iter_mut().zip(hi[0].iter()) {
                    if y != 0 {
                        *x = ring.add(*x, ring.mul(c, y));
                    }
                }
            }
        }
        exps[t] = k;
        t += 1;
    }
    exps
}

/// Order exponent of `(Z/p^E)^n / rowspace(rows)`: log_p of its size.
pub fn cokernel_log_order(ring: ModPow, rows: Vec<Vec<u128>>, ncols: usize) -> u32 {
    cokernel_exponents(ring, rows, ncols).iter().sum()
}
