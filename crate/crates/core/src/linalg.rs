//! Rank computations over F_p.

use alloc::vec::Vec;

/// Rank over F_p of a dense matrix given as rows of residues.
pub fn rank_mod_p(p: u32, mut rows: Vec<Vec<u32>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inverse_mod(rows[rank][col] % p, p);
        for x in rows[rank].iter_mut() {
            *x = (*x % p) * inv % p;
        }
        let pr = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank {
                continue;
            }
            let c = row[col] % p;
            if c == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(pr.iter()) {
                *x = (*x % p + p * p - c * y % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inverse_mod(a: u32, p: u32) -> u32 {
    let (a, p) = (a as u64, p as u64);
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result as u32
}

/// A sparse vector over F_p: `(column, nonzero residue)` sorted by column.
pub type SparseRow = Vec<(u32, u32)>;

/// `a + c b` over F_p.
pub fn axpy(p: u32, a: &[(u32, u32)], c: u32, b: &[(u32, u32)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |x| x.0);
        let cb = b.get(j).map_or(u32::MAX, |x| x.0);
        if ca < cb {
            out.push(a[i]);
            i += 1;
        } else if cb < ca {
            out.push((cb, (c as u64 * b[j].1 as u64 % p as u64) as u32));
            j += 1;
        } else {
            let v = (a[i].1 as u64 + c as u64 * b[j].1 as u64) % p as u64;
            if v != 0 {
                out.push((ca, v as u32));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sorts and reduces a list of `(column, coefficient)` terms, merging repeats.
pub fn normalize(p: u32, mut terms: Vec<(u32, i64)>) -> SparseRow {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: SparseRow = Vec::with_capacity(terms.len());
    let mut k = 0;
    while k < terms.len() {
        let col = terms[k].0;
        let mut v = 0i64;
        while k < terms.len() && terms[k].0 == col {
            v += terms[k].1;
            k += 1;
        }
        let v = v.rem_euclid(p as i64) as u32;
        if v != 0 {
            out.push((col, v));
        }
    }
    out
}

/// Row echelon form over F_p, built one row at a time.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u32,
    pivots: Vec<Option<SparseRow>>,
    rank: usize,
}

impl Echelon {
    pub fn new(p: u32, ncols: usize) -> Self {
        Echelon { p, pivots: alloc::vec![None; ncols], rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds a row; returns whether it was independent of the earlier rows.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        let p = self.p;
        while let Some(&(col, a)) = row.first() {
            match &self.pivots[col as usize] {
                Some(piv) => row = axpy(p, &row, p - a, piv),
                None => {
                    let inv = inverse_mod(a, p);
                    for t in row.iter_mut() {
                        t.1 = (t.1 as u64 * inv as u64 % p as u64) as u32;
                    }
                    self.pivots[col as usize] = Some(row);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

/// Rank over F_p of a sparse matrix.
pub fn rank_sparse(p: u32, mut rows: Vec<SparseRow>, ncols: usize) -> usize {
    rows.sort_by_key(|r| r.len());
    let mut e = Echelon::new(p, ncols);
    for r in rows {
        if !r.is_empty() {
            e.insert(r);
        }
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dense_and_sparse_agree() {
        let dense = vec![vec![1, 2, 0, 1], vec![2, 4, 0, 2], vec![0, 1, 1, 0], vec![1, 0, 1, 1]];
        let sparse: Vec<SparseRow> = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j as u32, x)).collect())
            .collect();
        assert_eq!(rank_mod_p(3, dense.clone(), 4), 2);
        assert_eq!(rank_sparse(3, sparse, 4), 2);
        assert_eq!(rank_mod_p(5, dense, 4), 3);
    }

    #[test]
    fn merge_and_inverse() {
        assert_eq!(axpy(3, &[(0, 1), (2, 2)], 2, &[(0, 1), (1, 1)]), vec![(1, 2), (2, 2)]);
        assert_eq!(normalize(5, vec![(3, 4), (1, 2), (3, 1)]), vec![(1, 2)]);
        for p in [2u32, 3, 5, 7] {
            for a in 1..p {
                assert_eq!(a * inverse_mod(a, p) % p, 1);
            }
        }
    }
}
