//! Modules over `E_1 = E[Q_0, Q_1]`: the mod-p cohomology of K(Z/p, 2), the
//! pieces of its splitting into non-free and free parts, Margolis homology,
//! and a brute-force `Ext_{E_1}(F_p, M)`.
//!
//! Ext is computed from the Koszul complex `M ⊗ P[h_0, v]` with
//! `δ(m h_0^a v^b) = Q_0(m) h_0^{a+1} v^b + Q_1(m) h_0^a v^{b+1}`; the class
//! `m h_0^a v^b` sits in codegree `|m| - 2(p-1)b` and filtration `a + b`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{axpy, normalize, rank_sparse, SparseRow};
use crate::padic::Prime;
use crate::series::PSeries;

/// Which Milnor primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Q0,
    Q1,
}

impl Primitive {
    pub fn degree(self, p: Prime) -> i64 {
        match self {
            Primitive::Q0 => 1,
            Primitive::Q1 => 2 * p.p64() - 1,
        }
    }

    fn slot(self) -> usize {
        match self {
            Primitive::Q0 => 0,
            Primitive::Q1 => 1,
        }
    }
}

/// A finite-type E_1-module known in degrees `0..=top`.
///
/// `Q_i` of a class in degree `d` is stored when `d + |Q_i| <= top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Module {
    prime: Prime,
    top: i64,
    labels: Vec<Vec<String>>,
    action: [Vec<Vec<SparseRow>>; 2],
}

impl E1Module {
    pub fn new(prime: Prime, top: i64) -> Self {
        let n = (top.max(-1) + 1) as usize;
        E1Module { prime, top, labels: vec![Vec::new(); n], action: [vec![Vec::new(); n], vec![Vec::new(); n]] }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Highest degree in which the module is known.
    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < 0 || d > self.top {
            0
        } else {
            self.labels[d as usize].len()
        }
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn label(&self, d: i64, i: usize) -> &str {
        &self.labels[d as usize][i]
    }

    /// Index of the class with the given label in degree `d`.
    pub fn find(&self, d: i64, label: &str) -> Option<usize> {
        if d < 0 || d > self.top {
            return None;
        }
        self.labels[d as usize].iter().position(|l| l == label)
    }

    /// Adds a basis class; classes above `top` are dropped and return `None`.
    pub fn add_class(&mut self, d: i64, label: String) -> Option<usize> {
        if d < 0 || d > self.top {
            return None;
        }
        let du = d as usize;
        self.labels[du].push(label);
        self.action[0][du].push(Vec::new());
        self.action[1][du].push(Vec::new());
        Some(self.labels[du].len() - 1)
    }

    /// Sets `Q(class) = row`, ignored when the target degree is above `top`.
    pub fn set_action(&mut self, q: Primitive, d: i64, i: usize, row: SparseRow) {
        if d + q.degree(self.prime) <= self.top {
            self.action[q.slot()][d as usize][i] = row;
        }
    }

    /// `Q(class)` as a sparse vector in degree `d + |Q|`.
    pub fn act(&self, q: Primitive, d: i64, i: usize) -> &SparseRow {
        &self.action[q.slot()][d as usize][i]
    }

    /// Whether `Q` out of degree `d` is known.
    pub fn action_known(&self, q: Primitive, d: i64) -> bool {
        d >= 0 && d + q.degree(self.prime) <= self.top
    }

    /// Appends `other` shifted up by `shift`, classes above `top` dropped.
    pub fn add_shifted(&mut self, other: &E1Module, shift: i64, prefix: &str) {
        let mut offsets = BTreeMap::new();
        for d in 0..=other.top {
            offsets.insert(d, self.dim(d + shift) as u32);
            for l in &other.labels[d as usize] {
                let label = if prefix.is_empty() {
                    l.clone()
                } else if l == "1" {
                    prefix.to_string()
                } else {
                    format!("{prefix} {l}")
                };
                self.add_class(d + shift, label);
            }
        }
        for q in [Primitive::Q0, Primitive::Q1] {
            let qd = q.degree(self.prime);
            for d in 0..=other.top {
                if !other.action_known(q, d) || d + shift + qd > self.top {
                    continue;
                }
                let base = offsets[&d] as usize;
                let tbase = offsets[&(d + qd)];
                for i in 0..other.dim(d) {
                    let row: SparseRow = other.act(q, d, i).iter().map(|&(c, v)| (c + tbase, v)).collect();
                    self.set_action(q, d + shift, base + i, row);
                }
            }
        }
    }

    /// `Q_0^2 = 0`, `Q_1^2 = 0` and `Q_0 Q_1 + Q_1 Q_0 = 0` wherever known.
    pub fn check_relations(&self) -> Result<()> {
        let p = self.prime.get();
        let q1d = Primitive::Q1.degree(self.prime);
        let compose = |a: Primitive, b: Primitive, d: i64, row: &SparseRow| -> SparseRow {
            // a(b(x)) for x given by row in degree d + |b|
            let mid = d + b.degree(self.prime);
            let mut acc = SparseRow::new();
            for &(c, v) in row {
                acc = axpy(p, &acc, v, self.act(a, mid, c as usize));
            }
            acc
        };
        for d in 0..=self.top {
            for i in 0..self.dim(d) {
                for q in [Primitive::Q0, Primitive::Q1] {
                    if self.action_known(q, d + q.degree(self.prime)) && self.action_known(q, d) {
                        let sq = compose(q, q, d, self.act(q, d, i));
                        if !sq.is_empty() {
                            return Err(Error::Integrity(format!("{q:?}^2 on {} is nonzero", self.label(d, i))));
                        }
                    }
                }
                if d + 1 + q1d <= self.top {
                    let a = compose(Primitive::Q0, Primitive::Q1, d, self.act(Primitive::Q1, d, i));
                    let b = compose(Primitive::Q1, Primitive::Q0, d, self.act(Primitive::Q0, d, i));
                    if !axpy(p, &a, 1, &b).is_empty() {
                        return Err(Error::Integrity(format!("Q0 Q1 + Q1 Q0 on {} is nonzero", self.label(d, i))));
                    }
                }
            }
        }
        Ok(())
    }

    fn rank_out(&self, q: Primitive, d: i64) -> usize {
        if d < 0 || self.dim(d) == 0 {
            return 0;
        }
        let ncols = self.dim(d + q.degree(self.prime));
        let rows: Vec<SparseRow> = (0..self.dim(d)).map(|i| self.act(q, d, i).clone()).collect();
        rank_sparse(self.prime.get(), rows, ncols)
    }

    /// Dimensions of `H(M; Q)` in degrees `0..=top - |Q|`.
    pub fn margolis_homology(&self, q: Primitive) -> Vec<usize> {
        let qd = q.degree(self.prime);
        let mut out = Vec::new();
        for d in 0..=(self.top - qd) {
            let kernel = self.dim(d) - self.rank_out(q, d);
            out.push(kernel - self.rank_out(q, d - qd));
        }
        out
    }
}

/// A generator of a free graded-commutative algebra with a derivation action.
/// Sum of `coefficient * monomial`, monomials as sparse exponent vectors.
type SparsePoly = Vec<(i64, Vec<(usize, u32)>)>;

#[derive(Debug, Clone)]
struct Generator {
    name: String,
    degree: i64,
    exterior: bool,
    /// `Q_0` and `Q_1` of the generator: sums of `coefficient * monomial`.
    action: [SparsePoly; 2],
}

/// `e * m` for exponent vectors, with the Koszul sign; `None` if an exterior
/// generator repeats.
fn signed_product(gens: &[Generator], e: &[(usize, u32)], m: &[u32]) -> Option<(i64, Vec<u32>)> {
    let mut out = m.to_vec();
    let mut sign = 1i64;
    for &(g, k) in e {
        if gens[g].exterior {
            if out[g] > 0 || k > 1 {
                return None;
            }
            let passed = (0..g).filter(|&i| gens[i].exterior && m[i] > 0).count();
            if passed % 2 == 1 {
                sign = -sign;
            }
        }
        out[g] += k;
    }
    Some((sign, out))
}

/// The free graded-commutative algebra on `gens`, truncated at `top`, with
/// `Q_0`, `Q_1` acting as odd derivations.
fn free_algebra(prime: Prime, gens: &[Generator], top: i64) -> E1Module {
    let mut module = E1Module::new(prime, top);
    let mut monomials: Vec<Vec<Vec<u32>>> = vec![Vec::new(); (top + 1) as usize];
    let mut current = vec![0u32; gens.len()];
    fn walk(gens: &[Generator], g: usize, deg: i64, top: i64, current: &mut Vec<u32>, out: &mut Vec<Vec<Vec<u32>>>) {
        if g == gens.len() {
            out[deg as usize].push(current.clone());
            return;
        }
        let max = if gens[g].exterior { 1 } else { u32::MAX };
        let mut e = 0;
        while e <= max && deg + gens[g].degree * e as i64 <= top {
            current[g] = e;
            walk(gens, g + 1, deg + gens[g].degree * e as i64, top, current, out);
            e += 1;
        }
        current[g] = 0;
    }
    walk(gens, 0, 0, top, &mut current, &mut monomials);
    let render = |m: &[u32]| -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(g, &e)| if e == 1 { gens[g].name.clone() } else { format!("{}^{e}", gens[g].name) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    };
    let mut index: Vec<BTreeMap<Vec<u32>, u32>> = Vec::new();
    for (d, ms) in monomials.iter_mut().enumerate() {
        ms.sort_unstable_by(|a, b| b.cmp(a));
        let mut idx = BTreeMap::new();
        for m in ms.iter() {
            let i = module.add_class(d as i64, render(m)).unwrap_or(0);
            idx.insert(m.clone(), i as u32);
        }
        index.push(idx);
    }
    let p = prime.get();
    for q in [Primitive::Q0, Primitive::Q1] {
        let slot = q.slot();
        let qd = q.degree(prime);
        for d in 0..=top {
            if d + qd > top {
                break;
            }
            let target = &index[(d + qd) as usize];
            for (i, m) in monomials[d as usize].iter().enumerate() {
                let mut terms: Vec<(u32, i64)> = Vec::new();
                let mut ext_before = 0;
                for g in 0..gens.len() {
                    let a = m[g];
                    if a == 0 {
                        continue;
                    }
                    let mut rest = m.clone();
                    rest[g] -= 1;
                    let (scale, koszul) =
                        if gens[g].exterior { (1i64, if ext_before % 2 == 1 { -1 } else { 1 }) } else { (a as i64, 1) };
                    for (c, e) in &gens[g].action[slot] {
                        if let Some((s, prod)) = signed_product(gens, e, &rest) {
                            terms.push((target[&prod], c * s * scale * koszul));
                        }
                    }
                    if gens[g].exterior {
                        ext_before += 1;
                    }
                }
                module.set_action(q, d, i, normalize(p, terms));
            }
        }
    }
    module
}

/// `H^*(K(Z/p, 2); F_p)` through degree `top`, unit class included.
///
/// For `p = 2` this is polynomial on `u_{2^j+1}`, `|u_{2^j+1}| = 2^j + 1`;
/// for odd `p` it is `P[y_0] ⊗ P[g_1, g_2, ...] ⊗ E[u_0, u_1, ...]` with
/// `|y_0| = 2`, `|g_j| = 2(p^j + 1)`, `|u_i| = 2p^i + 1`.
pub fn cohomology_k2(prime: Prime, top: i64) -> E1Module {
    let p = prime.p64();
    let mut gens = Vec::new();
    if p == 2 {
        let mut j = 0u32;
        while (1i64 << j) + 1 <= top {
            let idx = |k: u32| k as usize;
            let q0 = match j {
                0 => vec![(1, vec![(idx(1), 1)])],
                1 => vec![],
                _ => vec![(1, vec![(idx(j - 1), 2)])],
            };
            let q1 = match j {
                0 => vec![(1, vec![(idx(2), 1)])],
                1 => vec![(1, vec![(idx(1), 2)])],
                2 => vec![],
                _ => vec![(1, vec![(idx(j - 2), 4)])],
            };
            gens.push(Generator {
                name: format!("u{}", (1i64 << j) + 1),
                degree: (1i64 << j) + 1,
                exterior: false,
                action: [q0, q1],
            });
            j += 1;
        }
        // images may mention generators above `top`; those terms never land below it
        let count = gens.len();
        for g in gens.iter_mut() {
            for slot in 0..2 {
                g.action[slot].retain(|(_, e)| e.iter().all(|&(i, _)| i < count));
            }
        }
        return free_algebra(prime, &gens, top);
    }
    // order: y_0, g_1.., u_0..
    let n_g = (1..).take_while(|&j| prime.checked_pow(j).is_some_and(|x| 2 * (x + 1) <= top)).count();
    let n_u = (0..).take_while(|&i| prime.checked_pow(i).is_some_and(|x| 2 * x + 1 <= top)).count();
    let g_idx = |j: usize| if (1..=n_g).contains(&j) { Some(j) } else { None };
    let u_idx = |i: usize| if i < n_u { Some(1 + n_g + i) } else { None };
    let term = |c: i64, g: Option<usize>, e: u32| g.map(|g| (c, vec![(g, e)]));
    gens.push(Generator {
        name: "y0".to_string(),
        degree: 2,
        exterior: false,
        action: [term(1, u_idx(0), 1).into_iter().collect(), term(1, u_idx(1), 1).into_iter().collect()],
    });
    for j in 1..=n_g {
        gens.push(Generator {
            name: format!("g{j}"),
            degree: 2 * (p.pow(j as u32) + 1),
            exterior: false,
            action: [Vec::new(), Vec::new()],
        });
    }
    for i in 0..n_u {
        let (q0, q1) = match i {
            0 => (None, term(-1, g_idx(1), 1)),
            1 => (term(1, g_idx(1), 1), None),
            _ => (term(1, g_idx(i), 1), term(1, g_idx(i - 1), p as u32)),
        };
        gens.push(Generator {
            name: format!("u{i}"),
            degree: 2 * p.pow(i as u32) + 1,
            exterior: true,
            action: [q0.into_iter().collect(), q1.into_iter().collect()],
        });
    }
    free_algebra(prime, &gens, top)
}

/// Named pieces of the splitting of `H^*K(Z/p, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// The five-class (p = 2) or three-class (odd p) module carrying `q`.
    N,
    /// `L_k`: generators `g_{2i}`, `0 <= i <= k`, with `Q_1 g_{2i} = Q_0 g_{2i+2}`.
    L(u32),
    /// `M_j`, a suspension of `L_{j-4}` (p = 2) or `L_{j-2}` (odd p).
    M(u32),
    /// The sum of the `M_j` tensored with their trivial cofactors.
    R,
    /// `q R`.
    S,
    /// The whole non-free part.
    T,
}

fn add_row(m: &mut E1Module, q: Primitive, from: (i64, usize), to: usize, c: u32) {
    m.set_action(q, from.0, from.1, vec![(to as u32, c)]);
}

/// The E_1-module `piece`, through degree `top`.
pub fn build_piece(prime: Prime, piece: Piece, top: i64) -> Result<E1Module> {
    let p = prime.p64();
    let mut m = E1Module::new(prime, top);
    match piece {
        Piece::N => {
            if p == 2 {
                let mut c = BTreeMap::new();
                for (d, l) in [(5, "x5"), (7, "x7"), (8, "x8"), (9, "x9"), (10, "x10")] {
                    if let Some(i) = m.add_class(d, l.to_string()) {
                        c.insert(d, i);
                    }
                }
                let mut link = |q, a: i64, b: i64| {
                    if let (Some(&i), Some(&j)) = (c.get(&a), c.get(&b)) {
                        add_row(&mut m, q, (a, i), j, 1);
                    }
                };
                link(Primitive::Q1, 5, 8);
                link(Primitive::Q0, 7, 8);
                link(Primitive::Q1, 7, 10);
                link(Primitive::Q0, 9, 10);
            } else {
                let a = m.add_class(2 * p + 1, "y0^{p-1} u0".replace("{p-1}", &(p - 1).to_string()));
                let q = m.add_class(4 * p - 1, "q".to_string());
                let c = m.add_class(4 * p, "Q0 q".to_string());
                if let (Some(a), Some(q), Some(c)) = (a, q, c) {
                    add_row(&mut m, Primitive::Q0, (4 * p - 1, q), c, 1);
                    add_row(&mut m, Primitive::Q1, (2 * p + 1, a), c, 1);
                }
            }
        }
        Piece::L(k) => {
            let step = 2 * (p - 1);
            let mut idx = Vec::new();
            for i in 0..=k as i64 {
                let g = m.add_class(step * i, format!("g{}", 2 * i));
                let h = m.add_class(step * i + 1, format!("Q0 g{}", 2 * i));
                idx.push((g, h));
            }
            for i in 0..=k as usize {
                let d = step * i as i64;
                if let (Some(g), Some(h)) = idx[i] {
                    add_row(&mut m, Primitive::Q0, (d, g), h, 1);
                }
                if i < k as usize {
                    if let (Some(g), Some(h)) = (idx[i].0, idx[i + 1].1) {
                        add_row(&mut m, Primitive::Q1, (d, g), h, 1);
                    }
                }
            }
        }
        Piece::M(j) => {
            let (k, shift) = m_shape(prime, j)?;
            let l = build_piece(prime, Piece::L(k), (top - shift).max(0))?;
            m.add_shifted(&l, shift, "");
        }
        Piece::R => {
            for (j, cof_deg, cof) in r_layout(prime, top) {
                let (_, shift) = m_shape(prime, j)?;
                let mj = build_piece(prime, Piece::M(j), (top - cof_deg - shift).max(0) + shift)?;
                let prefix = format!("M{j}{}", if cof.is_empty() { String::new() } else { format!(" {cof}") });
                let mut tagged = E1Module::new(prime, mj.top());
                tagged.add_shifted(&mj, 0, &prefix);
                m.add_shifted(&tagged, cof_deg, "");
            }
        }
        Piece::S => {
            let qd = prime.q_degree();
            let r = build_piece(prime, Piece::R, (top - qd).max(0))?;
            m.add_shifted(&r, qd, "q");
        }
        Piece::T => {
            let step = if p == 2 { 4 } else { 2 * p };
            let unit_name = if p == 2 { "u2^2" } else { "y1" };
            let mut inner = E1Module::new(prime, top);
            inner.add_class(0, "1".to_string());
            for piece in [Piece::N, Piece::R, Piece::S] {
                inner.add_shifted(&build_piece(prime, piece, top)?, 0, "");
            }
            let mut e = 0;
            while e * step <= top {
                let prefix = match e {
                    0 => String::new(),
                    1 => unit_name.to_string(),
                    _ => format!("({unit_name})^{e}"),
                };
                m.add_shifted(&inner, e * step, &prefix);
                e += 1;
            }
        }
    }
    Ok(m)
}

/// `(k, shift)` with `M_j` the `shift`-fold suspension of `L_k`.
fn m_shape(prime: Prime, j: u32) -> Result<(u32, i64)> {
    let p = prime.p64();
    let first = if p == 2 { 4 } else { 2 };
    if j < first {
        return Err(Error::Unsupported(format!("M_{j} is zero for p = {p}")));
    }
    let shift = prime
        .checked_pow(j)
        .map(|x| if p == 2 { x + 1 } else { 2 * x + 1 })
        .ok_or_else(|| Error::Overflow(format!("degree of M_{j}")))?;
    Ok((j - first, shift))
}

/// `(j, degree, label)` of every trivial cofactor of `M_j` inside `R` below `top`.
fn r_layout(prime: Prime, top: i64) -> Vec<(u32, i64, String)> {
    let p = prime.p64();
    let mut out = Vec::new();
    let first = if p == 2 { 4 } else { 2 };
    let mut j = first;
    while let Ok((_, bottom)) = m_shape(prime, j) {
        if bottom > top {
            break;
        }
        // (generator label, degree, max exponent) of the cofactor algebra
        let mut factors: Vec<(String, i64, i64)> = Vec::new();
        if p == 2 {
            let mut k = j;
            while (1i64 << k) + 1 <= top {
                factors.push((format!("u{}^2", (1i64 << k) + 1), 2 * ((1i64 << k) + 1), 1));
                k += 1;
            }
        } else {
            let mut k = j;
            while prime.checked_pow(k).is_some_and(|x| 2 * (x + 1) <= top) {
                let cap = if k == j { p - 2 } else { p - 1 };
                factors.push((format!("g{k}"), 2 * (prime.pow(k) + 1), cap));
                k += 1;
            }
        }
        let mut stack: Vec<(usize, i64, String)> = vec![(0, 0, String::new())];
        while let Some((f, deg, label)) = stack.pop() {
            if f == factors.len() {
                out.push((j, deg, label));
                continue;
            }
            let (name, fd, cap) = &factors[f];
            for e in 0..=*cap {
                let d = deg + fd * e;
                if d + bottom > top {
                    break;
                }
                let l = match e {
                    0 => label.clone(),
                    _ => {
                        let t = if e == 1 { name.clone() } else { format!("{name}^{e}") };
                        if label.is_empty() {
                            t
                        } else {
                            format!("{label} {t}")
                        }
                    }
                };
                stack.push((f + 1, d, l));
            }
        }
        j += 1;
    }
    out.sort();
    out
}

/// Closed form of the Margolis homology of `H^*K(Z/p, 2)` as a Poincaré series.
///
/// * `p = 2`: `H(Q_0) = P[u_2^2] ⊗ E[x_5]`,
///   `H(Q_1) = P[u_2^2] ⊗ TP_4[x_9] ⊗ TP_4[x_17] ⊗ E[u_{2^j+1}^2 : j > 4]`;
/// * odd `p`: `H(Q_0) = P[y_1] ⊗ E[y_0^{p-1} u_0]`,
///   `H(Q_1) = P[y_1] ⊗ E[q] ⊗ E[w_1] ⊗ TP_p[g_2, g_3, ...]` with `|w_1| = 2p^2 + 1`.
pub fn margolis_closed_form(prime: Prime, q: Primitive, cutoff: usize) -> PSeries {
    let p = prime.p64() as usize;
    let c = cutoff;
    let ext = |d: usize| PSeries::from_terms(c, &[(0, 1), (d, 1)]);
    if p == 2 {
        let base = PSeries::geometric(c, 4);
        return match q {
            Primitive::Q0 => &base * &ext(5),
            Primitive::Q1 => {
                let mut s = &(&base * &PSeries::truncated(c, 9, 4)) * &PSeries::truncated(c, 17, 4);
                let mut j = 5;
                while (1usize << j) + 1 <= c {
                    s = &s * &ext(2 * ((1usize << j) + 1));
                    j += 1;
                }
                s
            }
        };
    }
    let base = PSeries::geometric(c, 2 * p);
    match q {
        Primitive::Q0 => &base * &ext(2 * p + 1),
        Primitive::Q1 => {
            let mut s = &(&base * &ext(4 * p - 1)) * &ext(2 * p * p + 1);
            let mut j = 2u32;
            while prime.checked_pow(j).is_some_and(|x| 2 * (x as usize + 1) <= c) {
                s = &s * &PSeries::truncated(c, 2 * (prime.pow(j) as usize + 1), p);
                j += 1;
            }
            s
        }
    }
}

/// Dimensions of `Ext_{E_1}(F_p, M)` by `(codegree, filtration)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtTable {
    pub prime: Prime,
    pub n_lo: i64,
    pub n_hi: i64,
    pub s_max: u32,
    pub dims: BTreeMap<(i64, u32), usize>,
}

impl ExtTable {
    pub fn dim(&self, n: i64, s: u32) -> usize {
        self.dims.get(&(n, s)).copied().unwrap_or(0)
    }
}

/// The Koszul complex `M ⊗ P[h_0, v]` on a window.
struct KoszulWindow<'a> {
    module: &'a E1Module,
    vd: i64,
}

impl KoszulWindow<'_> {
    /// Offsets of the `b`-blocks of `C^{n,s}` (block `b` is `M_{n + 2(p-1)b} h_0^{s-b} v^b`).
    fn blocks(&self, n: i64, s: u32) -> Vec<usize> {
        let mut off = vec![0usize];
        for b in 0..=s as i64 {
            let last = *off.last().unwrap_or(&0);
            off.push(last + self.module.dim(n + self.vd * b));
        }
        off
    }

    /// Rows of `δ : C^{n,s} -> C^{n+1,s+1}`.
    fn boundary(&self, n: i64, s: u32) -> (Vec<SparseRow>, usize) {
        let p = self.module.prime().get();
        let src = self.blocks(n, s);
        let tgt = self.blocks(n + 1, s + 1);
        let mut rows = Vec::with_capacity(*src.last().unwrap_or(&0));
        for b in 0..=s as usize {
            let d = n + self.vd * b as i64;
            for i in 0..self.module.dim(d) {
                let mut row = SparseRow::new();
                for (q, tb) in [(Primitive::Q0, b), (Primitive::Q1, b + 1)] {
                    let img = self.module.act(q, d, i);
                    let shifted: SparseRow = img.iter().map(|&(c, v)| (c + tgt[tb] as u32, v)).collect();
                    row = axpy(p, &row, 1, &shifted);
                }
                rows.push(row);
            }
        }
        (rows, *tgt.last().unwrap_or(&0))
    }
}

/// Smallest `top` for which [`ext_bruteforce`] can fill `n <= n_hi`, `s <= s_max`.
pub fn ext_required_top(prime: Prime, n_hi: i64, s_max: u32) -> i64 {
    n_hi + 1 + prime.v_degree() * (s_max as i64 + 1)
}

/// `Ext_{E_1}(F_p, M)` for codegrees `-2(p-1)s_max ..= n_hi` and filtrations `0..=s_max`.
pub fn ext_bruteforce(module: &E1Module, n_hi: i64, s_max: u32) -> Result<ExtTable> {
    let prime = module.prime();
    let need = ext_required_top(prime, n_hi, s_max);
    if module.top() < need {
        return Err(Error::WindowTooSmall(format!("module known through degree {}, Ext needs {need}", module.top())));
    }
    let vd = prime.v_degree();
    let n_lo = -vd * s_max as i64;
    let w = KoszulWindow { module, vd };
    let p = prime.get();
    let mut ranks: BTreeMap<(i64, u32), usize> = BTreeMap::new();
    let rank = |n: i64, s: u32, ranks: &mut BTreeMap<(i64, u32), usize>| -> usize {
        *ranks.entry((n, s)).or_insert_with(|| {
            let (rows, ncols) = w.boundary(n, s);
            rank_sparse(p, rows, ncols)
        })
    };
    let mut dims = BTreeMap::new();
    for s in 0..=s_max {
        for n in n_lo..=n_hi {
            let size = *w.blocks(n, s).last().unwrap_or(&0);
            if size == 0 {
                continue;
            }
            let out = rank(n, s, &mut ranks);
            let inc = if s == 0 { 0 } else { rank(n - 1, s - 1, &mut ranks) };
            let h = size - out - inc;
            if h > 0 {
                dims.insert((n, s), h);
            }
        }
    }
    Ok(ExtTable { prime, n_lo, n_hi, s_max, dims })
}

/// Checks `δ∘δ = 0` on the Koszul complex through `n_hi`, `s_max`.
pub fn koszul_square_zero(module: &E1Module, n_hi: i64, s_max: u32) -> Result<()> {
    let prime = module.prime();
    if module.top() < ext_required_top(prime, n_hi + 1, s_max + 1) {
        return Err(Error::WindowTooSmall("module too short for the square check".to_string()));
    }
    let vd = prime.v_degree();
    let w = KoszulWindow { module, vd };
    let p = prime.get();
    for s in 0..=s_max {
        for n in (-vd * s as i64)..=n_hi {
            let (first, _) = w.boundary(n, s);
            let (second, _) = w.boundary(n + 1, s + 1);
            for (i, r) in first.iter().enumerate() {
                let mut acc = SparseRow::new();
                for &(c, v) in r {
                    acc = axpy(p, &acc, v, &second[c as usize]);
                }
                if !acc.is_empty() {
                    return Err(Error::Integrity(format!("δ² nonzero at ({n}, {s}), basis element {i}")));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn generator_actions() {
        let h = cohomology_k2(p(2), 20);
        let u2 = h.find(2, "u2").unwrap();
        let u3 = h.find(3, "u3").unwrap();
        assert_eq!(h.act(Primitive::Q0, 2, u2), &vec![(u3 as u32, 1)]);
        let u3sq = h.find(6, "u3^2").unwrap();
        assert_eq!(h.act(Primitive::Q1, 3, u3), &vec![(u3sq as u32, 1)]);
        assert_eq!(h.dim(5), 2);
        h.check_relations().unwrap();
        let h3 = cohomology_k2(p(3), 60);
        h3.check_relations().unwrap();
        assert_eq!(h3.dim(0), 1);
        assert_eq!(h3.dim(3), 1);
    }

    #[test]
    fn wrong_sign_breaks_anticommutation() {
        // with Q_1 u_0 = +g_1 the relation Q0 Q1 + Q1 Q0 = 0 fails on y_0
        let prime = p(3);
        let gens = vec![
            Generator {
                name: "y0".into(),
                degree: 2,
                exterior: false,
                action: [vec![(1, vec![(2, 1)])], vec![(1, vec![(3, 1)])]],
            },
            Generator { name: "g1".into(), degree: 8, exterior: false, action: [vec![], vec![]] },
            Generator { name: "u0".into(), degree: 3, exterior: true, action: [vec![], vec![(1, vec![(1, 1)])]] },
            Generator { name: "u1".into(), degree: 7, exterior: true, action: [vec![(1, vec![(1, 1)])], vec![]] },
        ];
        assert!(free_algebra(prime, &gens, 20).check_relations().is_err());
    }

    #[test]
    fn pieces() {
        let n = build_piece(p(2), Piece::N, 20).unwrap();
        assert_eq!(n.total_dim(), 5);
        n.check_relations().unwrap();
        let l3 = build_piece(p(2), Piece::L(3), 20).unwrap();
        assert_eq!(l3.total_dim(), 8);
        l3.check_relations().unwrap();
        let m7 = build_piece(p(2), Piece::M(7), 200).unwrap();
        assert_eq!(m7.dim(129), 1);
        assert_eq!(m7.total_dim(), 8);
        let n3 = build_piece(p(3), Piece::N, 20).unwrap();
        assert_eq!((n3.dim(7), n3.dim(11), n3.dim(12)), (1, 1, 1));
    }

    #[test]
    fn ground_field_and_free_module() {
        let prime = p(3);
        let mut k = E1Module::new(prime, 40);
        k.add_class(0, "1".into());
        let e = ext_bruteforce(&k, 10, 4).unwrap();
        for s in 0..=4u32 {
            for n in e.n_lo..=10 {
                // h_0^a v^b lives in codegree -4b, filtration a + b
                let expect = usize::from(n <= 0 && n % 4 == 0 && (-n / 4) as u32 <= s);
                assert_eq!(e.dim(n, s), expect, "({n}, {s})");
            }
        }
        let mut f = E1Module::new(prime, 40);
        let x = f.add_class(2, "x".into()).unwrap();
        let a = f.add_class(3, "Q0 x".into()).unwrap();
        let b = f.add_class(7, "Q1 x".into()).unwrap();
        let c = f.add_class(8, "Q0 Q1 x".into()).unwrap();
        f.set_action(Primitive::Q0, 2, x, vec![(a as u32, 1)]);
        f.set_action(Primitive::Q1, 2, x, vec![(b as u32, 1)]);
        f.set_action(Primitive::Q0, 7, b, vec![(c as u32, 1)]);
        f.set_action(Primitive::Q1, 3, a, vec![(c as u32, 2)]);
        f.check_relations().unwrap();
        let e = ext_bruteforce(&f, 12, 3).unwrap();
        assert_eq!(e.dims.len(), 1);
        assert_eq!(e.dim(8, 0), 1);
    }
}
