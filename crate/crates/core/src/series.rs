//! Truncated integer power series and the Poincaré series of the free
//! E[Q_0, Q_1]-summands of the mod-p cohomology of K(Z/p, 2).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::padic::Prime;

/// A power series with integer coefficients, exact in degrees `0..=cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSeries {
    coeffs: Vec<i64>,
}

impl PSeries {
    pub fn zero(cutoff: usize) -> Self {
        PSeries { coeffs: vec![0; cutoff + 1] }
    }

    pub fn one(cutoff: usize) -> Self {
        Self::monomial(cutoff, 0, 1)
    }

    /// `c x^k`.
    pub fn monomial(cutoff: usize, k: usize, c: i64) -> Self {
        let mut s = Self::zero(cutoff);
        if k <= cutoff {
            s.coeffs[k] = c;
        }
        s
    }

    /// `sum c x^k` over the given terms.
    pub fn from_terms(cutoff: usize, terms: &[(usize, i64)]) -> Self {
        let mut s = Self::zero(cutoff);
        for &(k, c) in terms {
            if k <= cutoff {
                s.coeffs[k] += c;
            }
        }
        s
    }

    /// `1 / (1 - x^k)`, `k >= 1`.
    pub fn geometric(cutoff: usize, k: usize) -> Self {
        let mut s = Self::zero(cutoff);
        for i in (0..=cutoff).step_by(k.max(1)) {
            s.coeffs[i] = 1;
        }
        s
    }

    /// `1 + x^k + ... + x^{k(h-1)}`.
    pub fn truncated(cutoff: usize, k: usize, h: usize) -> Self {
        let terms: Vec<(usize, i64)> = (0..h).map(|i| (k * i, 1)).collect();
        Self::from_terms(cutoff, &terms)
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> i64 {
        self.coeffs.get(n).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `x^k` times `self`.
    pub fn shift(&self, k: usize) -> Self {
        let mut s = Self::zero(self.cutoff());
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i + k <= self.cutoff() {
                s.coeffs[i + k] = c;
            }
        }
        s
    }

    /// `self / (1 + x^k)`, `k >= 1`.
    pub fn div_one_plus(&self, k: usize) -> Self {
        let mut s = self.clone();
        for i in k..s.coeffs.len() {
            s.coeffs[i] -= s.coeffs[i - k];
        }
        s
    }

    /// First degree with a negative coefficient.
    pub fn first_negative(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c < 0)
    }
}

impl Add for &PSeries {
    type Output = PSeries;
    fn add(self, rhs: &PSeries) -> PSeries {
        let mut s = self.clone();
        for (a, b) in s.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        s
    }
}

impl Sub for &PSeries {
    type Output = PSeries;
    fn sub(self, rhs: &PSeries) -> PSeries {
        let mut s = self.clone();
        for (a, b) in s.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        s
    }
}

impl Mul for &PSeries {
    type Output = PSeries;
    fn mul(self, rhs: &PSeries) -> PSeries {
        let cutoff = self.cutoff().min(rhs.cutoff());
        let mut s = PSeries::zero(cutoff);
        for (i, &a) in self.coeffs.iter().enumerate().take(cutoff + 1) {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(cutoff + 1 - i) {
                s.coeffs[i + j] += a * b;
            }
        }
        s
    }
}

fn usize_degree(d: i64) -> usize {
    usize::try_from(d).unwrap_or(usize::MAX)
}

/// Poincaré series of `H^*(K(Z/p, 2); F_p)`.
pub fn cohomology_ps(p: Prime, cutoff: usize) -> PSeries {
    let c = cutoff as i64;
    if p.get() == 2 {
        // polynomial on classes of degree 2^k + 1
        let mut s = PSeries::one(cutoff);
        let mut k = 0;
        while (1i64 << k) + 1 <= c {
            s = &s * &PSeries::geometric(cutoff, (1usize << k) + 1);
            k += 1;
        }
        return s;
    }
    let pp = p.p64();
    let mut s = PSeries::geometric(cutoff, 2);
    let mut j = 1;
    while p.checked_pow(j).is_some_and(|x| 2 * (x + 1) <= c) {
        s = &s * &PSeries::geometric(cutoff, usize_degree(2 * (pp.pow(j) + 1)));
        j += 1;
    }
    let mut i = 0;
    while p.checked_pow(i).is_some_and(|x| 2 * x + 1 <= c) {
        s = &s * &PSeries::from_terms(cutoff, &[(0, 1), (usize_degree(2 * pp.pow(i) + 1), 1)]);
        i += 1;
    }
    s
}

/// Poincaré series of the part of the cohomology that is not a sum of free
/// E[Q_0, Q_1]-modules.
pub fn nonfree_ps(p: Prime, cutoff: usize) -> PSeries {
    let c = cutoff as i64;
    if p.get() == 2 {
        let low = &PSeries::geometric(cutoff, 4)
            * &PSeries::from_terms(cutoff, &[(0, 1), (5, 1), (7, 1), (8, 1), (9, 1), (10, 1)]);
        let mut rest = PSeries::zero(cutoff);
        let mut j: u32 = 4;
        while (1i64 << j) + 1 <= c {
            let mut t = PSeries::monomial(cutoff, (1usize << j) + 1, 1);
            t = &t * &PSeries::from_terms(cutoff, &[(0, 1), (9, 1)]);
            t = &t * &PSeries::from_terms(cutoff, &[(0, 1), (1, 1)]);
            t = &t * &PSeries::from_terms(cutoff, &[(0, 1), (2 * j as usize - 6, -1)]);
            let mut k = j;
            while (1i64 << (k + 1)) + 2 <= c {
                t = &t * &PSeries::from_terms(cutoff, &[(0, 1), ((1usize << (k + 1)) + 2, 1)]);
                k += 1;
            }
            rest = &rest + &t;
            j += 1;
        }
        let denom = &PSeries::geometric(cutoff, 2) * &PSeries::geometric(cutoff, 4);
        return &low + &(&rest * &denom);
    }
    let pp = p.p64();
    let pu = pp as usize;
    let g = |j: u32| usize_degree(2 * (pp.pow(j) + 1));
    let n = PSeries::from_terms(cutoff, &[(0, 1), (2 * pu + 1, 1), (4 * pu - 1, 1), (4 * pu, 1)]);
    let mut r = PSeries::zero(cutoff);
    let mut j = 2;
    while p.checked_pow(j).is_some_and(|x| 2 * x + 1 <= c) {
        let bottom = usize_degree(2 * pp.pow(j) + 1);
        let mut t = &PSeries::from_terms(cutoff, &[(bottom, 1), (bottom + 1, 1)])
            * &PSeries::truncated(cutoff, 2 * (pu - 1), j as usize - 1);
        t = &t * &PSeries::truncated(cutoff, g(j), pu - 1);
        let mut i = j + 1;
        while p.checked_pow(i).is_some_and(|x| 2 * (x + 1) <= c) {
            t = &t * &PSeries::truncated(cutoff, g(i), pu);
            i += 1;
        }
        r = &r + &t;
        j += 1;
    }
    let qr = r.shift(4 * pu - 1);
    &PSeries::geometric(cutoff, 2 * pu) * &(&(&n + &r) + &qr)
}

/// Number of free E[Q_0, Q_1]-summands by degree of their bottom class.
///
/// An error if any coefficient is negative, which would mean the non-free
/// part was mis-stated.
pub fn free_part_ps(p: Prime, cutoff: usize) -> Result<PSeries> {
    let free = &cohomology_ps(p, cutoff) - &nonfree_ps(p, cutoff);
    let q1 = usize_degree(2 * p.p64() - 1);
    let gens = free.div_one_plus(1).div_one_plus(q1);
    match gens.first_negative() {
        Some(n) => Err(Error::Integrity(format!("free part has negative coefficient {} in degree {n}", gens.coeff(n)))),
        None => Ok(gens),
    }
}

/// Number of `Z/p`'s with trivial v-action in ku-cohomology in degree `n`:
/// one for the top class of each free summand, `2p` above its bottom.
pub fn trivial_count(p: Prime, n: i64) -> Result<i64> {
    let bottom = n - p.homology_shift();
    if bottom < 0 {
        return Ok(0);
    }
    Ok(free_part_ps(p, bottom as usize)?.coeff(bottom as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = PSeries::geometric(10, 1);
        let b = PSeries::from_terms(10, &[(0, 1), (1, -1)]);
        assert_eq!(&a * &b, PSeries::one(10));
        let c = PSeries::from_terms(10, &[(0, 1), (3, 1)]);
        assert_eq!((&a * &c).div_one_plus(3), a);
        assert_eq!(PSeries::monomial(10, 2, 5).shift(3).coeff(5), 5);
        assert_eq!(PSeries::truncated(10, 3, 3).coeffs()[..8], [1, 0, 0, 1, 0, 0, 1, 0]);
    }

    #[test]
    fn free_generators() {
        let two = Prime::new(2).unwrap();
        let g = free_part_ps(two, 100).unwrap();
        assert_eq!(g.coeff(79), 245);
        assert_eq!(g.coeffs()[..12], [0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 2, 1]);
        assert_eq!(trivial_count(two, 83).unwrap(), 245);
        let three = Prime::new(3).unwrap();
        let g3 = free_part_ps(three, 30).unwrap();
        assert_eq!(g3.coeffs()[..12], [0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 2, 0]);
    }
}
