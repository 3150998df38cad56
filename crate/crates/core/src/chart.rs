//! Charts: v-towers of `Z/p` dots joined by multiplication-by-p edges.
//!
//! A dot `(tower, level)` stands for `v^level * gen`, in degree
//! `|gen| - 2(p-1) level` and Adams filtration `base_s + level`. An edge from
//! a dot lists the dots whose sum is p times it. The abelian group in a degree
//! is generated by its dots subject to these relations; a dot without an edge
//! is killed by p.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::rank_mod_p;
use crate::monomial::Monomial;
use crate::padic::Prime;
use crate::snf::{cokernel_exponents, cokernel_log_order, decompose, ModPow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dot {
    pub tower: usize,
    pub level: u32,
}

impl Dot {
    pub fn new(tower: usize, level: u32) -> Self {
        Dot { tower, level }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Detected by h0: filtration jumps by one along a standard p-extension.
    H0,
    /// A jump of more than one filtration, not visible to h0.
    Exotic,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::H0 => "h0",
            EdgeKind::Exotic => "exotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    pub gen: Monomial,
    pub base_s: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub dot: Dot,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PEdge {
    pub src: Dot,
    pub dst: Vec<Target>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    prime: Prime,
    towers: Vec<Tower>,
    tower_degrees: Vec<i64>,
    by_gen: BTreeMap<Monomial, usize>,
    edges: BTreeMap<Dot, PEdge>,
}

impl Chart {
    pub fn new(prime: Prime) -> Self {
        Chart { prime, towers: Vec::new(), tower_degrees: Vec::new(), by_gen: BTreeMap::new(), edges: BTreeMap::new() }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn towers(&self) -> &[Tower] {
        &self.towers
    }

    pub fn edges(&self) -> impl Iterator<Item = &PEdge> {
        self.edges.values()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_from(&self, src: Dot) -> Option<&PEdge> {
        self.edges.get(&src)
    }

    pub fn tower_degree(&self, t: usize) -> i64 {
        self.tower_degrees[t]
    }

    pub fn find_tower(&self, gen: &Monomial) -> Option<usize> {
        self.by_gen.get(gen).copied()
    }

    pub fn dot_count(&self) -> u64 {
        self.towers.iter().map(|t| t.height as u64).sum()
    }

    pub fn add_tower(&mut self, gen: Monomial, base_s: u32, height: u32) -> Result<usize> {
        if height == 0 {
            return Err(Error::MalformedChart(format!("empty tower on {}", gen.render(self.prime))));
        }
        if self.by_gen.contains_key(&gen) {
            return Err(Error::MalformedChart(format!("duplicate tower on {}", gen.render(self.prime))));
        }
        let id = self.towers.len();
        self.tower_degrees.push(gen.degree(self.prime));
        self.by_gen.insert(gen.clone(), id);
        self.towers.push(Tower { gen, base_s, height });
        Ok(id)
    }

    pub fn contains(&self, d: Dot) -> bool {
        d.tower < self.towers.len() && d.level < self.towers[d.tower].height
    }

    pub fn dot_degree(&self, d: Dot) -> i64 {
        self.tower_degrees[d.tower] - self.prime.v_degree() * d.level as i64
    }

    pub fn dot_filtration(&self, d: Dot) -> u32 {
        self.towers[d.tower].base_s + d.level
    }

    /// Adds `target` to the p-multiple of `src`.
    pub fn add_edge(&mut self, src: Dot, target: Dot, kind: EdgeKind) -> Result<()> {
        if !self.contains(src) || !self.contains(target) {
            return Err(Error::MalformedChart(format!("edge {src:?} -> {target:?} leaves the chart")));
        }
        if self.dot_degree(src) != self.dot_degree(target) {
            return Err(Error::MalformedChart(format!("edge {src:?} -> {target:?} changes degree")));
        }
        if self.dot_filtration(target) <= self.dot_filtration(src) {
            return Err(Error::MalformedChart(format!("edge {src:?} -> {target:?} does not raise filtration")));
        }
        let e = self.edges.entry(src).or_insert_with(|| PEdge { src, dst: Vec::new() });
        if e.dst.iter().any(|t| t.dot == target) {
            return Err(Error::MalformedChart(format!("repeated edge {src:?} -> {target:?}")));
        }
        e.dst.push(Target { dot: target, kind });
        e.dst.sort_by_key(|t| t.dot);
        Ok(())
    }

    /// Copies `other` into `self`; returns the tower offset of the copy.
    pub fn direct_sum(&mut self, other: &Chart) -> Result<usize> {
        let offset = self.towers.len();
        for t in &other.towers {
            self.add_tower(t.gen.clone(), t.base_s, t.height)?;
        }
        let shift = |d: Dot| Dot::new(d.tower + offset, d.level);
        for e in other.edges.values() {
            self.edges.insert(
                shift(e.src),
                PEdge {
                    src: shift(e.src),
                    dst: e.dst.iter().map(|t| Target { dot: shift(t.dot), kind: t.kind }).collect(),
                },
            );
        }
        Ok(offset)
    }

    /// The same chart with every generator multiplied by `m`.
    pub fn tensor_monomial(&self, m: &Monomial) -> Result<Chart> {
        let mut out = Chart::new(self.prime);
        for t in &self.towers {
            out.add_tower(t.gen.mul(m)?, t.base_s, t.height)?;
        }
        out.edges = self.edges.clone();
        Ok(out)
    }

    /// Checks that every edge stays in the chart and commutes with v:
    /// the edge out of `v x` is the v-shift of the edge out of `x`.
    pub fn validate(&self) -> Result<()> {
        for e in self.edges.values() {
            for t in &e.dst {
                if !self.contains(t.dot) || self.dot_degree(t.dot) != self.dot_degree(e.src) {
                    return Err(Error::MalformedChart(format!("bad edge {:?}", e)));
                }
            }
        }
        for (ti, t) in self.towers.iter().enumerate() {
            for level in 0..t.height {
                let here: Vec<Dot> = self.targets(Dot::new(ti, level));
                let shifted: Vec<Dot> =
                    here.iter().map(|d| Dot::new(d.tower, d.level + 1)).filter(|d| self.contains(*d)).collect();
                if level + 1 < t.height {
                    let mut next = self.targets(Dot::new(ti, level + 1));
                    next.sort();
                    let mut sh = shifted;
                    sh.sort();
                    if next != sh {
                        return Err(Error::MalformedChart(format!(
                            "p-multiplication does not commute with v at {}",
                            self.describe(Dot::new(ti, level))
                        )));
                    }
                } else if !shifted.is_empty() {
                    return Err(Error::MalformedChart(format!(
                        "v kills {} but not p times it",
                        self.describe(Dot::new(ti, level))
                    )));
                }
            }
        }
        Ok(())
    }

    fn targets(&self, d: Dot) -> Vec<Dot> {
        self.edges.get(&d).map(|e| e.dst.iter().map(|t| t.dot).collect()).unwrap_or_default()
    }

    pub fn describe(&self, d: Dot) -> String {
        let t = &self.towers[d.tower];
        if d.level == 0 {
            t.gen.render(self.prime)
        } else {
            format!("v^{} {}", d.level, t.gen.render(self.prime))
        }
    }

    /// Dots in degree `n`, ordered by tower.
    pub fn dots_at(&self, n: i64) -> Vec<Dot> {
        let vd = self.prime.v_degree();
        let mut out = Vec::new();
        for (ti, t) in self.towers.iter().enumerate() {
            let diff = self.tower_degrees[ti] - n;
            if diff >= 0 && diff % vd == 0 {
                let level = diff / vd;
                if level < t.height as i64 {
                    out.push(Dot::new(ti, level as u32));
                }
            }
        }
        out
    }

    /// Number of dots in each (degree, filtration) bidegree with degree in `lo..=hi`.
    pub fn bidegree_counts(&self, lo: i64, hi: i64) -> BTreeMap<(i64, u32), u64> {
        let mut out = BTreeMap::new();
        let vd = self.prime.v_degree();
        for (ti, t) in self.towers.iter().enumerate() {
            let top = self.tower_degrees[ti];
            for level in 0..t.height {
                let n = top - vd * level as i64;
                if n < lo {
                    break;
                }
                if n <= hi {
                    *out.entry((n, t.base_s + level)).or_insert(0) += 1;
                }
            }
        }
        out
    }

    /// Smallest degree of any dot.
    pub fn min_degree(&self) -> Option<i64> {
        let vd = self.prime.v_degree();
        (0..self.towers.len()).map(|ti| self.tower_degrees[ti] - vd * (self.towers[ti].height as i64 - 1)).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.tower_degrees.iter().copied().max()
    }

    /// Local presentation in degree `n`: dots and relation rows over `Z/p^E`.
    fn presentation(&self, n: i64) -> Result<LocalPresentation> {
        let dots = self.dots_at(n);
        let index: BTreeMap<Dot, usize> = dots.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        let mut targets: Vec<Vec<usize>> = vec![Vec::new(); dots.len()];
        for (i, d) in dots.iter().enumerate() {
            if let Some(e) = self.edges.get(d) {
                for t in &e.dst {
                    let j = *index.get(&t.dot).ok_or_else(|| {
                        Error::MalformedChart(format!("edge out of {} leaves degree {n}", self.describe(*d)))
                    })?;
                    targets[i].push(j);
                }
            }
        }
        // longest p-chain through each dot bounds the exponent
        let mut order: Vec<usize> = (0..dots.len()).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.dot_filtration(dots[i])));
        let mut chain = vec![1u32; dots.len()];
        for &i in &order {
            chain[i] = 1 + targets[i].iter().map(|&j| chain[j]).max().unwrap_or(0);
        }
        let bound = chain.iter().copied().max().unwrap_or(1);
        Ok(LocalPresentation { dots, targets, exponent_bound: bound })
    }

    /// The abelian group in degree `n`.
    pub fn group_at(&self, n: i64) -> Result<AbelianPGroup> {
        let pres = self.presentation(n)?;
        let p = self.prime.get();
        let mut exps = Vec::new();
        for part in pres.components() {
            let ring = ModPow::new(p as u64, part.exponent_bound)?;
            let rows = part.relation_rows(ring);
            exps.extend(cokernel_exponents(ring, rows, part.dots.len()));
        }
        Ok(AbelianPGroup::from_exponents(p, exps))
    }

    /// The module structure on degrees `lo..=hi` in cyclic coordinates.
    pub fn realize(&self, lo: i64, hi: i64) -> Result<RealizedWindow> {
        if lo > hi {
            return Err(Error::InvalidWindow { from: lo, to: hi });
        }
        let vd = self.prime.v_degree();
        let p = self.prime.get() as u64;
        let mut pres = BTreeMap::new();
        let mut e_max = 1;
        for n in lo..=hi {
            let pr = self.presentation(n)?;
            if !pr.dots.is_empty() {
                e_max = e_max.max(pr.exponent_bound);
                pres.insert(n, pr);
            }
        }
        let ring = ModPow::new(p, e_max)?;
        struct Local {
            index: BTreeMap<Dot, usize>,
            keep: Vec<usize>,
            exps: Vec<u32>,
            basis: Vec<Vec<u128>>,
            basis_inv: Vec<Vec<u128>>,
        }
        let mut locals: BTreeMap<i64, Local> = BTreeMap::new();
        for (&n, pr) in &pres {
            let d = decompose(ring, pr.relation_rows(ring), pr.dots.len());
            let keep: Vec<usize> = (0..d.exponents.len()).filter(|&i| d.exponents[i] > 0).collect();
            locals.insert(
                n,
                Local {
                    index: pr.dots.iter().enumerate().map(|(i, d)| (*d, i)).collect(),
                    exps: keep.iter().map(|&i| d.exponents[i]).collect(),
                    keep,
                    basis: d.basis,
                    basis_inv: d.basis_inv,
                },
            );
        }
        let mut components = BTreeMap::new();
        let mut v_maps = BTreeMap::new();
        for n in lo..=hi {
            let exps = locals.get(&n).map(|l| l.exps.clone()).unwrap_or_default();
            components.insert(n, exps);
        }
        for n in lo..=hi {
            let target = n - vd;
            if target < lo {
                continue;
            }
            let (Some(src), tgt) = (locals.get(&n), locals.get(&target)) else {
                v_maps.insert(n, Vec::new());
                continue;
            };
            let mut rows = Vec::with_capacity(src.keep.len());
            for &gi in &src.keep {
                let x = &src.basis_inv[gi];
                let mut row = vec![0u128; tgt.map_or(0, |t| t.keep.len())];
                if let Some(t) = tgt {
                    // x in dot coordinates at n, pushed up one level
                    let mut xv = vec![0u128; t.index.len()];
                    for (&dot, &i) in &src.index {
                        let c = x[i];
                        if c == 0 {
                            continue;
                        }
                        let up = Dot::new(dot.tower, dot.level + 1);
                        if let Some(&j) = t.index.get(&up) {
                            xv[j] = ring.add(xv[j], c);
                        }
                    }
                    for (col, &kj) in t.keep.iter().enumerate() {
                        let mut s = 0u128;
                        for (j, &c) in xv.iter().enumerate() {
                            if c != 0 {
                                s = ring.add(s, ring.mul(c, t.basis[j][kj]));
                            }
                        }
                        row[col] = s % summand_modulus(ring, t.exps[col]);
                    }
                }
                rows.push(row);
            }
            v_maps.insert(n, rows);
        }
        Ok(RealizedWindow { prime: self.prime, lo, hi, ring, components, v_maps })
    }
}

fn summand_modulus(ring: ModPow, e: u32) -> u128 {
    if e >= ring.exponent() {
        ring.modulus()
    } else {
        ring.pow_p(e)
    }
}

struct LocalPresentation {
    dots: Vec<Dot>,
    targets: Vec<Vec<usize>>,
    exponent_bound: u32,
}

impl LocalPresentation {
    /// Splits into blocks that share no relation.
    fn components(&self) -> Vec<LocalPresentation> {
        let n = self.dots.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..n {
            for &j in &self.targets[i] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups
            .into_values()
            .map(|members| {
                let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                let targets: Vec<Vec<usize>> =
                    members.iter().map(|&i| self.targets[i].iter().map(|j| local[j]).collect()).collect();
                let mut chain = vec![1u32; members.len()];
                // targets have higher filtration, so a fixed number of sweeps settles
                for _ in 0..members.len() {
                    let mut changed = false;
                    for k in 0..members.len() {
                        let c = 1 + targets[k].iter().map(|&j| chain[j]).max().unwrap_or(0);
                        if c != chain[k] {
                            chain[k] = c;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                LocalPresentation {
                    dots: members.iter().map(|&i| self.dots[i]).collect(),
                    targets,
                    exponent_bound: chain.into_iter().max().unwrap_or(1),
                }
            })
            .collect()
    }

    fn relation_rows(&self, ring: ModPow) -> Vec<Vec<u128>> {
        let n = self.dots.len();
        let minus_one = ring.reduce_i128(-1);
        (0..n)
            .map(|i| {
                let mut row = vec![0u128; n];
                row[i] = ring.reduce_i128(ring.p() as i128);
                for &j in &self.targets[i] {
                    row[j] = ring.add(row[j], minus_one);
                }
                row
            })
            .collect()
    }
}

/// A finite abelian p-group, as the exponents of its cyclic summands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    pub p: u32,
    /// Exponents `e` of the summands `Z/p^e`, largest first.
    pub exponents: Vec<u32>,
}

impl AbelianPGroup {
    pub fn trivial(p: u32) -> Self {
        AbelianPGroup { p, exponents: Vec::new() }
    }

    pub fn from_exponents(p: u32, mut exponents: Vec<u32>) -> Self {
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        AbelianPGroup { p, exponents }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Number of cyclic summands, i.e. the dimension of the kernel (or cokernel) of p.
    pub fn summand_count(&self) -> usize {
        self.exponents.len()
    }

    /// log_p of the order.
    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Whether `other` is a direct summand of `self`, i.e. its exponent multiset is contained in ours.
    pub fn contains_summand(&self, other: &AbelianPGroup) -> bool {
        let mut rest = self.exponents.clone();
        other.exponents.iter().all(|e| match rest.iter().position(|x| x == e) {
            Some(i) => {
                rest.remove(i);
                true
            }
            None => false,
        })
    }

    /// Orders `p^e` of the summands, largest first.
    pub fn orders(&self) -> Vec<u128> {
        self.exponents.iter().map(|&e| (self.p as u128).pow(e)).collect()
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            match (self.p as u128).checked_pow(*e) {
                Some(o) => write!(f, "Z/{o}")?,
                None => write!(f, "Z/{}^{}", self.p, e)?,
            }
        }
        Ok(())
    }
}

/// The v- and p-module structure of a chart on a finite degree window, with
/// each degree written as a sum of cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedWindow {
    prime: Prime,
    lo: i64,
    hi: i64,
    ring: ModPow,
    /// Exponents of the cyclic summands in each degree.
    components: BTreeMap<i64, Vec<u32>>,
    /// Matrix of `v` from degree `n` to `n - 2(p-1)`, rows indexed by summands at `n`.
    v_maps: BTreeMap<i64, Vec<Vec<u128>>>,
}

impl RealizedWindow {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn group(&self, n: i64) -> Result<AbelianPGroup> {
        let exps = self
            .components
            .get(&n)
            .ok_or_else(|| Error::WindowTooSmall(format!("degree {n} outside {}..{}", self.lo, self.hi)))?;
        Ok(AbelianPGroup::from_exponents(self.prime.get(), exps.clone()))
    }

    fn exps(&self, n: i64) -> Result<&Vec<u32>> {
        self.components
            .get(&n)
            .ok_or_else(|| Error::WindowTooSmall(format!("degree {n} outside {}..{}", self.lo, self.hi)))
    }

    /// Matrix of `v^b` out of degree `n`, in cyclic coordinates.
    fn v_power(&self, n: i64, b: u32) -> Result<Vec<Vec<u128>>> {
        let ring = self.ring;
        let src = self.exps(n)?;
        let mut m: Vec<Vec<u128>> = (0..src.len())
            .map(|i| {
                let mut r = vec![0u128; src.len()];
                r[i] = 1;
                r
            })
            .collect();
        let mut at = n;
        for _ in 0..b {
            let next = at - self.prime.v_degree();
            let tgt = self.exps(next)?;
            let step = self.v_maps.get(&at).ok_or_else(|| Error::WindowTooSmall(format!("v out of degree {at}")))?;
            let mut out = vec![vec![0u128; tgt.len()]; m.len()];
            for (i, row) in m.iter().enumerate() {
                for (k, &c) in row.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for (j, &s) in step[k].iter().enumerate() {
                        if s != 0 {
                            out[i][j] = ring.add(out[i][j], ring.mul(c, s));
                        }
                    }
                }
            }
            for row in out.iter_mut() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x %= summand_modulus(ring, tgt[j]);
                }
            }
            m = out;
            at = next;
        }
        Ok(m)
    }

    /// log_p of the order of the image of `x -> p^a v^b x` on degree `n`.
    pub fn rank_invariant(&self, n: i64, a: u32, b: u32) -> Result<u32> {
        let ring = self.ring;
        let m = self.v_power(n, b)?;
        let target = n - self.prime.v_degree() * b as i64;
        let tgt = self.exps(target)?;
        let pa = ring.pow_p(a);
        let mut rows: Vec<Vec<u128>> =
            m.into_iter().map(|r| r.into_iter().map(|x| ring.mul(x, pa)).collect()).collect();
        for (j, &e) in tgt.iter().enumerate() {
            let mut r = vec![0u128; tgt.len()];
            r[j] = ring.pow_p(e);
            rows.push(r);
        }
        let total: u32 = tgt.iter().sum();
        let quotient = cokernel_log_order(ring, rows, tgt.len());
        Ok(total - quotient)
    }

    /// Rank over F_p of `v^b` restricted to the p-torsion, out of degree `n`.
    pub fn torsion_v_rank(&self, n: i64, b: u32) -> Result<usize> {
        let ring = self.ring;
        let src = self.exps(n)?.clone();
        let m = self.v_power(n, b)?;
        let target = n - self.prime.v_degree() * b as i64;
        let tgt = self.exps(target)?;
        let p = self.prime.get() as u128;
        let rows: Vec<Vec<u32>> = m
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let y = ring.mul(x, ring.pow_p(src[i] - 1)) % (p.pow(tgt[j]));
                        ((y / p.pow(tgt[j] - 1)) % p) as u32
                    })
                    .collect()
            })
            .collect();
        Ok(rank_mod_p(self.prime.get(), rows, tgt.len()))
    }

    /// The Pontryagin dual, with degree `n` of the dual carrying the dual of
    /// degree `-n`; v acts by the transpose.
    pub fn dualize(&self) -> RealizedWindow {
        let ring = self.ring;
        let vd = self.prime.v_degree();
        let p = self.prime.get() as u128;
        let components: BTreeMap<i64, Vec<u32>> = self.components.iter().map(|(&n, e)| (-n, e.clone())).collect();
        let mut v_maps = BTreeMap::new();
        for (&m, psi) in &self.v_maps {
            // psi : degree m -> m - vd; its dual goes from -(m - vd) to -m
            let d = vd - m;
            let src_e = &self.components[&m];
            let tgt_e = match self.components.get(&(m - vd)) {
                Some(e) => e,
                None => continue,
            };
            let mut rows = vec![vec![0u128; src_e.len()]; tgt_e.len()];
            for (i, r) in psi.iter().enumerate() {
                for (j, &x) in r.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let (ei, ej) = (src_e[i], tgt_e[j]);
                    let c = if ei >= ej { ring.mul(x, p.pow(ei - ej)) } else { x / p.pow(ej - ei) };
                    rows[j][i] = c % p.pow(ei);
                }
            }
            v_maps.insert(d, rows);
        }
        RealizedWindow { prime: self.prime, lo: -self.hi, hi: -self.lo, ring, components, v_maps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    /// Towers on z_1 (degree 10) and y_0^7 (degree 14), with p v^i z_1 = v^{i+2} y_0^7.
    fn two_tower_chart() -> Chart {
        let mut c = Chart::new(p(2));
        let a = c.add_tower(Monomial::z(1, 1), 0, 3).unwrap();
        let b = c.add_tower(Monomial::y0_power(7), 0, 5).unwrap();
        for level in 0..3 {
            c.add_edge(Dot::new(a, level), Dot::new(b, level + 2), EdgeKind::Exotic).unwrap();
        }
        c
    }

    #[test]
    fn trivial_and_display() {
        let g = AbelianPGroup::from_exponents(2, vec![1, 3, 0]);
        assert_eq!(alloc::format!("{g}"), "Z/8 ⊕ Z/2");
        assert_eq!(g.summand_count(), 2);
        assert_eq!(alloc::format!("{}", AbelianPGroup::trivial(3)), "0");
    }

    #[test]
    fn edges_must_keep_degree() {
        let mut c = two_tower_chart();
        assert!(c.add_edge(Dot::new(0, 0), Dot::new(1, 0), EdgeKind::H0).is_err());
        assert!(c.add_edge(Dot::new(1, 2), Dot::new(0, 0), EdgeKind::H0).is_err());
    }

    #[test]
    fn two_tower_groups() {
        let c = two_tower_chart();
        c.validate().unwrap();
        assert_eq!(c.group_at(14).unwrap().exponents, vec![1]);
        assert_eq!(c.group_at(12).unwrap().exponents, vec![1]);
        assert_eq!(c.group_at(10).unwrap().exponents, vec![2]);
        assert_eq!(c.group_at(6).unwrap().exponents, vec![2]);
        assert_eq!(c.group_at(4).unwrap().exponents, Vec::<u32>::new());
        let w = c.realize(0, 16).unwrap();
        assert_eq!(w.rank_invariant(10, 1, 0).unwrap(), 1);
        assert_eq!(w.rank_invariant(10, 0, 1).unwrap(), 2);
        assert_eq!(w.rank_invariant(10, 0, 2).unwrap(), 2);
        assert_eq!(w.rank_invariant(10, 0, 3).unwrap(), 0);
        assert_eq!(w.rank_invariant(10, 1, 2).unwrap(), 1);
        assert_eq!(w.rank_invariant(14, 0, 4).unwrap(), 1);
        assert_eq!(w.torsion_v_rank(10, 1).unwrap(), 1);
    }

    #[test]
    fn v_incompatible_edges_are_rejected() {
        let mut c = Chart::new(p(2));
        let a = c.add_tower(Monomial::z(1, 1), 0, 3).unwrap();
        let b = c.add_tower(Monomial::y0_power(7), 0, 5).unwrap();
        c.add_edge(Dot::new(a, 0), Dot::new(b, 2), EdgeKind::Exotic).unwrap();
        // the edges out of v z_1 and v^2 z_1 are missing
        assert!(c.validate().is_err());
        let mut c = Chart::new(p(2));
        let a = c.add_tower(Monomial::z(1, 1), 0, 3).unwrap();
        let b = c.add_tower(Monomial::y0_power(7), 0, 6).unwrap();
        for level in 0..3 {
            c.add_edge(Dot::new(a, level), Dot::new(b, level + 2), EdgeKind::Exotic).unwrap();
        }
        // v^3 z_1 = 0 but v^5 y_0^7 survives
        assert!(c.validate().is_err());
    }

    #[test]
    fn dual_rank_invariants_match_transposes() {
        let c = two_tower_chart();
        let w = c.realize(0, 14).unwrap();
        let d = w.dualize();
        for n in 0..=14i64 {
            for a in 0..3 {
                for b in 0..4u32 {
                    let m = n + 2 * b as i64;
                    if m > 14 {
                        continue;
                    }
                    assert_eq!(
                        w.rank_invariant(m, a, b).unwrap(),
                        d.rank_invariant(-n, a, b).unwrap(),
                        "n={n} a={a} b={b}"
                    );
                }
            }
        }
        let dd = d.dualize();
        for n in 0..=14i64 {
            for b in 0..3u32 {
                if n - 2 * (b as i64) < 0 {
                    continue;
                }
                assert_eq!(dd.rank_invariant(n, 0, b).unwrap(), w.rank_invariant(n, 0, b).unwrap());
            }
        }
    }
}
