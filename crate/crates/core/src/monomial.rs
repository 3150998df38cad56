//! Monomials in `y_i`, `z_j` and `q`, their degrees, text form, and the
//! degree-bounded monomial families used to place chart summands.
//!
//! Since `y_{i+1} = y_i^p`, the y-part of a monomial is stored as a single
//! power of `y_0` and rendered through its base-p digits. The `z_j` are
//! independent polynomial generators; `q` is exterior.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::padic::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    q: bool,
    y0: u64,
    z: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn q() -> Self {
        Monomial { q: true, ..Monomial::default() }
    }

    /// `y_i^e`.
    pub fn y(p: Prime, i: u32, e: u64) -> Self {
        Monomial { y0: e * p.pow(i) as u64, ..Monomial::default() }
    }

    /// `y_0^e`.
    pub fn y0_power(e: u64) -> Self {
        Monomial { y0: e, ..Monomial::default() }
    }

    /// `z_j^e`.
    pub fn z(j: u32, e: u32) -> Self {
        let mut m = Monomial::default();
        m.set_z(j, e);
        m
    }

    /// `z_i (z_i z_{i+1} ... z_{j-1})^{p-1}`; equals `z_i` when `i == j`.
    pub fn zij(p: Prime, i: u32, j: u32) -> Self {
        let mut m = Monomial::z_block(p, i, j);
        m.set_z(j, m.z_exponent(j) + 1);
        if i < j {
            // the leading factor is z_i itself, not z_j
            m.set_z(j, m.z_exponent(j) - 1);
            m.set_z(i, m.z_exponent(i) + 1);
        }
        m
    }

    /// `(z_i z_{i+1} ... z_{j-1})^{p-1}`; the empty product when `i >= j`.
    pub fn z_block(p: Prime, i: u32, j: u32) -> Self {
        let mut m = Monomial::default();
        for k in i..j {
            m.set_z(k, p.get() - 1);
        }
        m
    }

    fn set_z(&mut self, j: u32, e: u32) {
        let j = j as usize;
        if self.z.len() <= j {
            if e == 0 {
                return;
            }
            self.z.resize(j + 1, 0);
        }
        self.z[j] = e;
        while self.z.last() == Some(&0) {
            self.z.pop();
        }
    }

    pub fn has_q(&self) -> bool {
        self.q
    }

    pub fn y0_exponent(&self) -> u64 {
        self.y0
    }

    pub fn z_exponent(&self, j: u32) -> u32 {
        self.z.get(j as usize).copied().unwrap_or(0)
    }

    /// Exponents of `z_0, z_1, ...` up to the last nonzero one.
    pub fn z_exponents(&self) -> &[u32] {
        &self.z
    }

    pub fn is_one(&self) -> bool {
        !self.q && self.y0 == 0 && self.z.is_empty()
    }

    pub fn has_z(&self) -> bool {
        !self.z.is_empty()
    }

    /// Smallest `j` with `z_j` dividing the monomial.
    pub fn min_z_index(&self) -> Option<u32> {
        self.z.iter().position(|&e| e > 0).map(|j| j as u32)
    }

    /// Total number of `z` factors counted with multiplicity.
    pub fn z_count(&self) -> u32 {
        self.z.iter().sum()
    }

    /// The monomial with its y-part and `q` removed.
    pub fn z_part(&self) -> Self {
        Monomial { q: false, y0: 0, z: self.z.clone() }
    }

    /// The monomial with its z-part and `q` removed.
    pub fn y_part(&self) -> Self {
        Monomial { q: false, y0: self.y0, z: Vec::new() }
    }

    /// Base-p digits of the y-part: entry `i` is the exponent of `y_i`.
    pub fn y_digits(&self, p: Prime) -> Vec<u32> {
        let mut out = Vec::new();
        let mut e = self.y0;
        let pp = p.get() as u64;
        while e > 0 {
            out.push((e % pp) as u32);
            e /= pp;
        }
        out
    }

    pub fn degree(&self, p: Prime) -> i64 {
        let mut d = 2 * self.y0 as i64;
        for (j, &e) in self.z.iter().enumerate() {
            d += e as i64 * p.z_degree(j as u32);
        }
        if self.q {
            d += p.q_degree();
        }
        d
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.q && other.q {
            return Err(Error::QSquared);
        }
        let n = self.z.len().max(other.z.len());
        let mut z = Vec::with_capacity(n);
        for j in 0..n {
            z.push(self.z.get(j).copied().unwrap_or(0) + other.z.get(j).copied().unwrap_or(0));
        }
        Ok(Monomial { q: self.q || other.q, y0: self.y0 + other.y0, z })
    }

    /// Exact quotient, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if (other.q && !self.q) || other.y0 > self.y0 || other.z.len() > self.z.len() {
            return None;
        }
        let mut z = self.z.clone();
        for (j, &e) in other.z.iter().enumerate() {
            z[j] = z[j].checked_sub(e)?;
        }
        let mut m = Monomial { q: self.q && !other.q, y0: self.y0 - other.y0, z };
        while m.z.last() == Some(&0) {
            m.z.pop();
        }
        Some(m)
    }

    /// Ordering used when listing monomials of a family: degree first, then
    /// z-exponents by ascending index, then the y-part, then `q`.
    pub fn listing_key(&self, p: Prime) -> (i64, Vec<u32>, u64, bool) {
        (self.degree(p), self.z.clone(), self.y0, self.q)
    }

    /// Text form such as `q y1 y2^2 z3 z4^2`; `1` for the unit.
    pub fn render(&self, p: Prime) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.q {
            parts.push("q".into());
        }
        for (i, d) in self.y_digits(p).into_iter().enumerate() {
            match d {
                0 => {}
                1 => parts.push(format!("y{i}")),
                d => parts.push(format!("y{i}^{d}")),
            }
        }
        for (j, &e) in self.z.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("z{j}")),
                e => parts.push(format!("z{j}^{e}")),
            }
        }
        if parts.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for (k, part) in parts.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{part}");
        }
        s
    }

    /// Parses the text form produced by [`Monomial::render`]. Also accepts
    /// `z[i,j]` for `z_i (z_i ... z_{j-1})^{p-1}`, repeated factors, `*`
    /// separators and optional underscores (`y_3`).
    pub fn parse(p: Prime, s: &str) -> Result<Monomial> {
        let err = |m: &str| Error::Parse(format!("{s:?}: {m}"));
        let mut out = Monomial::one();
        let cleaned: String = s.chars().map(|c| if c == '*' { ' ' } else { c }).collect();
        let mut tokens = cleaned.split_whitespace().peekable();
        if tokens.peek().is_none() {
            return Err(err("empty"));
        }
        for tok in tokens {
            let tok = tok.replace('_', "");
            if tok == "1" {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e: u64 = e.parse().map_err(|_| err("bad exponent"))?;
                    (b.to_string_owned(), e)
                }
                None => (tok.clone(), 1),
            };
            let factor = if base == "q" {
                match exp {
                    0 => Monomial::one(),
                    1 => Monomial::q(),
                    _ => return Err(Error::QSquared),
                }
            } else if let Some(rest) = base.strip_prefix("z[") {
                let inner = rest.strip_suffix(']').ok_or_else(|| err("unclosed z["))?;
                let (i, j) = inner.split_once(',').ok_or_else(|| err("z[i,j] needs two indices"))?;
                let i: u32 = i.trim().parse().map_err(|_| err("bad index"))?;
                let j: u32 = j.trim().parse().map_err(|_| err("bad index"))?;
                if i > j {
                    return Err(err("z[i,j] needs i <= j"));
                }
                let one = Monomial::zij(p, i, j);
                let mut acc = Monomial::one();
                for _ in 0..exp {
                    acc = acc.mul(&one)?;
                }
                acc
            } else if let Some(idx) = base.strip_prefix('y') {
                let i: u32 = idx.parse().map_err(|_| err("bad y index"))?;
                if p.checked_pow(i).is_none() {
                    return Err(err("y index too large"));
                }
                Monomial::y(p, i, exp)
            } else if let Some(idx) = base.strip_prefix('z') {
                let j: u32 = idx.parse().map_err(|_| err("bad z index"))?;
                let e = u32::try_from(exp).map_err(|_| err("exponent too large"))?;
                Monomial::z(j, e)
            } else {
                return Err(err("unknown generator"));
            };
            out = out.mul(&factor)?;
        }
        Ok(out)
    }
}

trait ToOwnedString {
    fn to_string_owned(&self) -> String;
}

impl ToOwnedString for str {
    fn to_string_owned(&self) -> String {
        String::from(self)
    }
}

/// One factor of a product family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    /// `y_i^e` for `lo <= e <= hi` (`hi = None` means unbounded).
    Y { index: u32, lo: u64, hi: Option<u64> },
    /// `z_j^e` for `lo <= e <= hi`.
    Z { index: u32, lo: u32, hi: u32 },
    /// All monomials in `z_j, z_{j+1}, ...` with exponents at most `p-1`.
    Lambda { from: u32 },
    /// The nonempty monomials of `Lambda { from }`.
    LambdaReduced { from: u32 },
    /// `1` and `q`.
    ExteriorQ,
    /// A fixed monomial.
    Fixed(Monomial),
}

/// Degree-bounded monomial families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialFamily {
    /// `M_p[z_j, z_{j+1}, ...]`.
    Lambda(u32),
    /// `(M_p[z_k, y_k] - {z_k^{p-1}, y_k^{p-1}}) M_p[z_i, y_i : i > k]`.
    Placement(u32),
    /// The z-free part of [`MonomialFamily::Placement`].
    PlacementA(u32),
    /// The part of [`MonomialFamily::Placement`] involving some `z`.
    PlacementB(u32),
    /// A product of factors.
    Product(Vec<Factor>),
}

impl MonomialFamily {
    /// All members of degree at most `max_degree`, sorted by [`Monomial::listing_key`].
    pub fn enumerate(&self, p: Prime, max_degree: i64) -> Vec<Monomial> {
        let mut out = match self {
            MonomialFamily::Lambda(j) => product(p, &[Factor::Lambda { from: *j }], max_degree),
            MonomialFamily::Placement(k) => placement(p, *k, max_degree, None),
            MonomialFamily::PlacementA(k) => placement(p, *k, max_degree, Some(false)),
            MonomialFamily::PlacementB(k) => placement(p, *k, max_degree, Some(true)),
            MonomialFamily::Product(f) => product(p, f, max_degree),
        };
        out.sort_by_cached_key(|m| m.listing_key(p));
        out.dedup();
        out
    }
}

fn placement(p: Prime, k: u32, max_degree: i64, want_z: Option<bool>) -> Vec<Monomial> {
    let top = p.get() - 1;
    let mut out = Vec::new();
    for ez in 0..=top {
        for ey in 0..=top {
            if (ez, ey) == (top, 0) || (ez, ey) == (0, top) {
                continue;
            }
            let mut factors = alloc::vec![
                Factor::Z { index: k, lo: ez, hi: ez },
                Factor::Y { index: k, lo: ey as u64, hi: Some(ey as u64) },
                Factor::Y { index: k + 1, lo: 0, hi: None },
            ];
            match want_z {
                Some(false) => {}
                Some(true) if ez == 0 => factors.push(Factor::LambdaReduced { from: k + 1 }),
                _ => factors.push(Factor::Lambda { from: k + 1 }),
            }
            if want_z == Some(false) && ez > 0 {
                continue;
            }
            out.extend(product(p, &factors, max_degree));
        }
    }
    out
}

fn product(p: Prime, factors: &[Factor], max_degree: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut acc = Monomial::one();
    product_rec(p, factors, max_degree, &mut acc, &mut out);
    out
}

fn product_rec(p: Prime, factors: &[Factor], max_degree: i64, acc: &mut Monomial, out: &mut Vec<Monomial>) {
    let deg = acc.degree(p);
    if deg > max_degree {
        return;
    }
    let Some((first, rest)) = factors.split_first() else {
        out.push(acc.clone());
        return;
    };
    match first {
        Factor::Y { index, lo, hi } => {
            let Some(step) = p.checked_pow(*index) else { return };
            let step = step as u64;
            let mut e = *lo;
            loop {
                if hi.is_some_and(|h| e > h) {
                    break;
                }
                let add = e * step;
                if deg + 2 * add as i64 > max_degree {
                    break;
                }
                acc.y0 += add;
                product_rec(p, rest, max_degree, acc, out);
                acc.y0 -= add;
                e += 1;
            }
        }
        Factor::Z { index, lo, hi } => {
            if *lo > 0 && p.checked_pow(index + 1).is_none() {
                return;
            }
            for e in *lo..=*hi {
                if e > 0 && deg + e as i64 * p.z_degree(*index) > max_degree {
                    break;
                }
                let old = acc.z_exponent(*index);
                acc.set_z(*index, old + e);
                product_rec(p, rest, max_degree, acc, out);
                acc.set_z(*index, old);
            }
        }
        Factor::Lambda { from } => lambda_rec(p, *from, false, rest, max_degree, acc, out),
        Factor::LambdaReduced { from } => lambda_rec(p, *from, true, rest, max_degree, acc, out),
        Factor::ExteriorQ => {
            product_rec(p, rest, max_degree, acc, out);
            if !acc.q {
                acc.q = true;
                product_rec(p, rest, max_degree, acc, out);
                acc.q = false;
            }
        }
        Factor::Fixed(m) => {
            if let Ok(next) = acc.mul(m) {
                let saved = core::mem::replace(acc, next);
                product_rec(p, rest, max_degree, acc, out);
                *acc = saved;
            }
        }
    }
}

fn lambda_rec(
    p: Prime,
    j: u32,
    need_one: bool,
    rest: &[Factor],
    max_degree: i64,
    acc: &mut Monomial,
    out: &mut Vec<Monomial>,
) {
    let deg = acc.degree(p);
    let zd = match p.checked_pow(j + 1) {
        Some(x) => 2 * (x + 1),
        None => i64::MAX,
    };
    if deg.saturating_add(zd) > max_degree {
        if !need_one {
            product_rec(p, rest, max_degree, acc, out);
        }
        return;
    }
    let old = acc.z_exponent(j);
    for e in 0..p.get() {
        if deg + e as i64 * zd > max_degree {
            break;
        }
        acc.set_z(j, old + e);
        lambda_rec(p, j + 1, need_one && e == 0, rest, max_degree, acc, out);
        acc.set_z(j, old);
    }
}
