//! Primes, p-adic valuations and the truncation-height sequences `r` and `r'`.

use alloc::vec::Vec;
use num_bigint::BigUint;

use crate::error::{Error, Result};

/// A prime together with the degree conventions used throughout the crate.
///
/// Degrees are cohomological: `y_i` sits in `2p^i`, `z_j` in `2(p^{j+1}+1)`,
/// `q` in 9 for p = 2 and `4p-1` otherwise, and the Bott class `v` lowers
/// degree by `2(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    /// Largest prime accepted. Degree arithmetic is done in `i64`.
    pub const MAX: u32 = 97;

    pub fn new(p: u32) -> Result<Self> {
        if (2..=Self::MAX).contains(&p) && (2..p).all(|d| p % d != 0) {
            Ok(Prime(p))
        } else {
            Err(Error::InvalidPrime(p))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn p64(self) -> i64 {
        self.0 as i64
    }

    /// Smallest index of a `z` generator that starts a chain: 2 for p = 2, else 1.
    pub fn k0(self) -> u32 {
        if self.0 == 2 {
            2
        } else {
            1
        }
    }

    /// `p^e`, or `None` if it does not fit in an `i64`.
    pub fn checked_pow(self, e: u32) -> Option<i64> {
        self.p64().checked_pow(e)
    }

    /// `p^e`; panics on overflow, which only happens far outside any usable window.
    pub fn pow(self, e: u32) -> i64 {
        self.checked_pow(e).expect("p^e overflows i64")
    }

    /// Degree drop of one `v` multiplication.
    pub fn v_degree(self) -> i64 {
        2 * (self.p64() - 1)
    }

    pub fn y_degree(self, i: u32) -> i64 {
        2 * self.pow(i)
    }

    pub fn z_degree(self, j: u32) -> i64 {
        2 * (self.pow(j + 1) + 1)
    }

    pub fn q_degree(self) -> i64 {
        if self.0 == 2 {
            9
        } else {
            4 * self.p64() - 1
        }
    }

    /// Degree of `z_i (z_i ... z_{j-1})^{p-1}`.
    pub fn zij_degree(self, i: u32, j: u32) -> i64 {
        2 * (self.pow(j + 1) + 1 + (self.p64() - 1) * (j as i64 - i as i64))
    }

    /// Offset between a ku-cohomology summand and its counterpart in ku-homology.
    pub fn homology_shift(self) -> i64 {
        2 * self.p64()
    }
}

/// p-adic valuation of a nonzero integer.
pub fn nu(p: Prime, n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    let p = p.get() as u64;
    let mut n = n;
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    Ok(k)
}

/// The sequences `r` and `r'` that govern v-tower heights in k(1)-cohomology.
///
/// `r(0)=1, r(1)=p, r(j+2)=r(j)+p^{j+1}(p-1)+1` and
/// `r'(0)=p-1, r'(1)=p^2-p, r'(j+2)=r'(j)+p^{j+2}(p-1)-1`.
#[derive(Debug, Clone)]
pub struct HeightSequences {
    p: Prime,
    r: Vec<BigUint>,
    r_prime: Vec<BigUint>,
}

impl HeightSequences {
    pub fn new(p: Prime) -> Self {
        let pp = BigUint::from(p.get());
        let one = BigUint::from(1u32);
        HeightSequences { p, r: alloc::vec![one, pp.clone()], r_prime: alloc::vec![&pp - 1u32, &pp * &pp - &pp] }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    fn extend_to(&mut self, j: usize) {
        let p = BigUint::from(self.p.get());
        while self.r.len() <= j {
            let n = self.r.len();
            // n = m + 2
            let m = n - 2;
            let pm1 = p.pow((m + 1) as u32);
            let pm2 = p.pow((m + 2) as u32);
            let next_r = &self.r[m] + &pm1 * (&p - 1u32) + 1u32;
            let next_rp = &self.r_prime[m] + &pm2 * (&p - 1u32) - 1u32;
            self.r.push(next_r);
            self.r_prime.push(next_rp);
        }
    }

    pub fn r(&mut self, j: u32) -> BigUint {
        self.extend_to(j as usize);
        self.r[j as usize].clone()
    }

    pub fn r_prime(&mut self, j: u32) -> BigUint {
        self.extend_to(j as usize);
        self.r_prime[j as usize].clone()
    }

    /// `r(j)` as a machine integer, if it fits.
    pub fn r_u64(&mut self, j: u32) -> Option<u64> {
        u64::try_from(&self.r(j)).ok()
    }

    pub fn r_prime_u64(&mut self, j: u32) -> Option<u64> {
        u64::try_from(&self.r_prime(j)).ok()
    }
}

/// `r(j)` computed without caching.
pub fn r(p: Prime, j: u32) -> BigUint {
    HeightSequences::new(p).r(j)
}

/// `r'(j)` computed without caching.
pub fn r_prime(p: Prime, j: u32) -> BigUint {
    HeightSequences::new(p).r_prime(j)
}

/// Half-gradings `(|T|, |M|, M')` of the tower pair indexed by `(l, t)`, `t >= 1`.
///
/// `M = y_1^{l p^{t-1}} z_t`-type class and `T` the class whose differential
/// truncates its v-tower; `M'` is the lowest half-grading reached by the
/// v-tower on `M` in k(1)-cohomology.
pub fn tower_pair_half_gradings(p: Prime, l: u64, t: u32) -> Result<(u64, u64, u64)> {
    if t == 0 {
        return Err(Error::InvalidWindow { from: 0, to: 0 });
    }
    let pp = p.get() as u64;
    let pt = pp.checked_pow(t).ok_or_else(|| Error::Overflow(alloc::format!("{pp}^{t}")))?;
    let ovf = || Error::Overflow(alloc::format!("tower pair ({l}, {t})"));
    let lo = (pp - 1).checked_mul(l).and_then(|x| x.checked_add(1)).ok_or_else(ovf)?;
    let hi = (pp - 1).checked_mul(l).and_then(|x| x.checked_add(pp)).ok_or_else(ovf)?;
    let t_grading = pt.checked_mul(lo).and_then(|x| x.checked_add(1)).ok_or_else(ovf)?;
    let m_grading = pt.checked_mul(hi).and_then(|x| x.checked_add(1)).ok_or_else(ovf)?;
    let rp = r_prime(p, t - 1);
    let drop = u64::try_from(&(rp * (pp - 1))).map_err(|_| ovf())?;
    let m_low = m_grading.checked_sub(drop).ok_or_else(ovf)?;
    Ok((t_grading, m_grading, m_low))
}
