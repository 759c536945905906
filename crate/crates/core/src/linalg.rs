//! Exact rational linear algebra: sparse matrices, Gaussian elimination,
//! reduced row echelon form, nullspaces and unnormalized Gram–Schmidt.
//!
//! Everything here is over `Rat` (arbitrary-precision rationals). Matrices in
//! the truncated Fock models are very sparse (a handful of entries per
//! column), so the workhorse representation is row-major adjacency lists;
//! elimination routines densify on demand.

use num_traits::{One, Signed, Zero};

use crate::Rat;

/// Sparse rational matrix, row-major with column-sorted rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, Rat)>>,
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i].push((i, Rat::one()));
        }
        m
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rat)>,
    ) -> Self {
        let mut m = Self::zero(rows, cols);
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet out of bounds");
            if !v.is_zero() {
                m.entries[r].push((c, v));
            }
        }
        for row in &mut m.entries {
            row.sort_by_key(|(c, _)| *c);
            // merge duplicates
            let mut merged: Vec<(usize, Rat)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Rat)] {
        &self.entries[r]
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.entries[r]
            .binary_search_by_key(&c, |(cc, _)| *cc)
            .map(|i| self.entries[r][i].1.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    /// Largest absolute value among entries (0 for the zero matrix).
    pub fn max_abs(&self) -> Rat {
        let mut best = Rat::zero();
        for row in &self.entries {
            for (_, v) in row {
                let a = v.abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                m.entries[*c].push((r, v.clone()));
            }
        }
        // rows were scanned in increasing r, so each transposed row is sorted
        m
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        let mut m = self.clone();
        for row in &mut m.entries {
            for (_, v) in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = Self::zero(self.rows, self.cols);
        for r in 0..self.rows {
            m.entries[r] = merge_rows(&self.entries[r], &other.entries[r], false);
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = Self::zero(self.rows, self.cols);
        for r in 0..self.rows {
            m.entries[r] = merge_rows(&self.entries[r], &other.entries[r], true);
        }
        m
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut m = Self::zero(self.rows, other.cols);
        let mut acc: Vec<Rat> = vec![Rat::zero(); other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.rows {
            for (k, a) in &self.entries[r] {
                for (c, b) in &other.entries[*k] {
                    if acc[*c].is_zero() {
                        touched.push(*c);
                    }
                    acc[*c] += a * b;
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for c in touched.drain(..) {
                let v = std::mem::replace(&mut acc[c], Rat::zero());
                if !v.is_zero() {
                    row.push((c, v));
                }
            }
            m.entries[r] = row;
        }
        m
    }

    /// Apply to a sparse column vector given as (index, value) pairs;
    /// the input need not be sorted or duplicate-free.
    pub fn apply(&self, x: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
        let canonical: Vec<(usize, Rat)> = if x.windows(2).all(|w| w[0].0 < w[1].0) {
            x.to_vec()
        } else {
            let mut sorted = x.to_vec();
            sorted.sort_by_key(|(i, _)| *i);
            let mut merged: Vec<(usize, Rat)> = Vec::with_capacity(sorted.len());
            for (i, v) in sorted {
                match merged.last_mut() {
                    Some((li, lv)) if *li == i => *lv += v,
                    _ => merged.push((i, v)),
                }
            }
            merged
        };
        let mut out: Vec<(usize, Rat)> = Vec::new();
        for r in 0..self.rows {
            let mut s = Rat::zero();
            for (c, v) in &self.entries[r] {
                if let Ok(i) = canonical.binary_search_by_key(c, |(ix, _)| *ix) {
                    s += v * &canonical[i].1;
                }
            }
            if !s.is_zero() {
                out.push((r, s));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut d = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                d[r][*c] = v.clone();
            }
        }
        d
    }

    pub fn to_f64_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                d[r][*c] = rat_to_f64(v);
            }
        }
        d
    }
}

fn merge_rows(a: &[(usize, Rat)], b: &[(usize, Rat)], subtract: bool) -> Vec<(usize, Rat)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 <= b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 <= a[i].0);
        if take_a && take_b {
            let v = if subtract {
                &a[i].1 - &b[j].1
            } else {
                &a[i].1 + &b[j].1
            };
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        } else if take_a {
            out.push(a[i].clone());
            i += 1;
        } else {
            let v = if subtract {
                -b[j].1.clone()
            } else {
                b[j].1.clone()
            };
            out.push((b[j].0, v));
            j += 1;
        }
    }
    out
}

/// f64 conversion that survives numerators/denominators beyond u64.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // extremely large components: fall back to a log-scaled quotient
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// In-place reduced row echelon form; returns pivot column indices.
pub fn rref(mat: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].clone();
        for v in &mut mat[r] {
            *v /= &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..cols {
                    let t = &mat[r][j] * &f;
                    mat[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of a dense rational matrix.
pub fn rank(mut mat: Vec<Vec<Rat>>) -> usize {
    rref(&mut mat).len()
}

/// Rank of a list of rational row vectors.
pub fn row_rank(rows: &[Vec<Rat>]) -> usize {
    rank(rows.to_vec())
}

/// Canonical reduced-row-echelon basis for the span of `rows` (zero rows dropped).
pub fn rref_basis(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut mat = rows.to_vec();
    let pivots = rref(&mut mat);
    mat.truncate(pivots.len());
    mat
}

/// Basis of the right nullspace {x : mat·x = 0} of a dense matrix with
/// `cols` columns (works for zero-row matrices too).
pub fn nullspace(mut mat: Vec<Vec<Rat>>, cols: usize) -> Vec<Vec<Rat>> {
    let pivots = rref(&mut mat);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rat::zero(); cols];
        v[f] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            // row i reads x_p + sum over free columns = 0
            v[p] = -mat[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Does `v` lie in the span of `basis`?
pub fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let r0 = row_rank(basis);
    let mut stacked = basis.to_vec();
    stacked.push(v.to_vec());
    row_rank(&stacked) == r0
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt without normalization: returns pairwise-orthogonal rational
/// vectors with the same span (zero vectors dropped). No square roots appear,
/// so the result stays rational.
pub fn orthogonalize(vectors: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &basis {
            let coef = dot(&w, u) / dot(u, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= &coef * ui;
            }
        }
        if !w.iter().all(|x| x.is_zero()) {
            basis.push(w);
        }
    }
    basis
}

/// Orthogonal complement of span(`basis`) inside ℚ^`dim`, as an orthogonalized
/// rational basis.
pub fn orthogonal_complement(basis: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if basis.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut v = vec![Rat::zero(); dim];
                v[i] = Rat::one();
                v
            })
            .collect();
    }
    let complement = nullspace(basis.to_vec(), dim);
    orthogonalize(&complement)
}

/// Matrix of the orthogonal projection of ℚ^`dim` onto span(`basis`)
/// (columns indexed by input coordinates).
pub fn projection_matrix(basis: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    let ortho = orthogonalize(basis);
    let mut p = vec![vec![Rat::zero(); dim]; dim];
    for u in &ortho {
        let nn = dot(u, u);
        for i in 0..dim {
            for j in 0..dim {
                p[i][j] += &u[i] * &u[j] / &nn;
            }
        }
    }
    p
}
