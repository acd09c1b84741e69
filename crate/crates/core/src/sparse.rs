//! Sparse matrices: [`SparseSym`] stores the upper triangle of a symmetric
//! matrix, [`Csr`] is a general compressed-row matrix used for matvecs and
//! rectangular maps.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

/// Symmetric sparse matrix holding only entries with `row <= col`,
/// consolidated (sorted, summed, explicit zeros removed) and kept in
/// compressed-row order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Consolidate triplets. Entries below the diagonal are mirrored into
    /// the upper triangle, so callers may push either half (not both).
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        for t in triplets.iter_mut() {
            assert!(t.0 < dim && t.1 < dim, "entry ({}, {}) outside dim {dim}", t.0, t.1);
            if t.0 > t.1 {
                core::mem::swap(&mut t.0, &mut t.1);
            }
        }
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = alloc::vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            dim,
            row_ptr,
            cols: out_cols,
            vals: out_vals,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (upper-triangle) entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(row, col, value)` with `row <= col`, in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p], self.vals[p])))
    }

    /// Upper-triangle part of row `r`: `(col, value)` with `col >= r`.
    pub fn upper_row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let span = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match span.binary_search(&c) {
            Ok(p) => self.vals[self.row_ptr[r] + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = K x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (c, v) = (self.cols[p], self.vals[p]);
                acc += v * x[c];
                if c != r {
                    y[c] += v * x[r];
                }
            }
            y[r] += acc;
        }
    }

    /// `x^T K x`-style bilinear form `x^T K y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ky = alloc::vec![0.0; self.dim];
        self.matvec(y, &mut ky);
        dot(x, &ky)
    }

    /// `sum_i c_i K_i`; all terms must share the dimension.
    pub fn linear_combination(terms: &[(f64, &SparseSym)]) -> SparseSym {
        let dim = terms.first().map_or(0, |t| t.1.dim);
        let mut trip = Vec::with_capacity(terms.iter().map(|t| t.1.nnz()).sum());
        for &(c, k) in terms {
            assert_eq!(k.dim, dim, "dimension mismatch in linear combination");
            if c != 0.0 {
                trip.extend(k.entries().map(|(r, col, v)| (r, col, c * v)));
            }
        }
        SparseSym::from_triplets(dim, trip)
    }

    pub fn scaled(&self, c: f64) -> SparseSym {
        SparseSym::linear_combination(&[(c, self)])
    }

    /// Principal submatrix on the index set `keep`; `slot(i)` gives the new
    /// index of old index `i`, `None` when dropped.
    pub fn restrict(&self, keep: &[usize], slot: impl Fn(usize) -> Option<usize>) -> SparseSym {
        let mut trip = Vec::new();
        for (r, c, v) in self.entries() {
            if let (Some(a), Some(b)) = (slot(r), slot(c)) {
                trip.push((a, b, v));
            }
        }
        SparseSym::from_triplets(keep.len(), trip)
    }

    /// Full symmetric compressed-row copy.
    pub fn to_csr(&self) -> Csr {
        let mut trip = Vec::with_capacity(2 * self.nnz());
        for (r, c, v) in self.entries() {
            trip.push((r, c, v));
            if r != c {
                trip.push((c, r, v));
            }
        }
        Csr::from_triplets(self.dim, self.dim, trip)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = alloc::vec![alloc::vec![0.0; self.dim]; self.dim];
        for (r, c, v) in self.entries() {
            d[r][c] = v;
            d[c][r] = v;
        }
        d
    }

    /// Coordinate text dump: header `%%sym dim nnz`, then one `i j value`
    /// line per stored upper-triangle entry (0-based).
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "%%sym {} {}", self.dim, self.nnz());
        for (r, c, v) in self.entries() {
            let _ = writeln!(s, "{r} {c} {v:.16e}");
        }
        s
    }

    /// Union sparsity pattern with unit values, for symbolic analysis.
    pub fn pattern_union(mats: &[&SparseSym]) -> SparseSym {
        let dim = mats.first().map_or(0, |m| m.dim);
        let mut trip = Vec::new();
        for m in mats {
            trip.extend(m.entries().map(|(r, c, _)| (r, c, 1.0)));
        }
        // diagonal always present
        trip.extend((0..dim).map(|i| (i, i, 1.0)));
        trip.sort_unstable_by_key(|t| (t.0, t.1));
        trip.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        SparseSym::from_triplets(dim, trip)
    }
}

/// General compressed-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = alloc::vec![0usize; rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        span.binary_search(&j).map_or(0.0, |p| self.vals[self.row_ptr[i] + p])
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[p] * x[self.col_idx[p]];
            }
            *out = acc;
        }
    }

    /// `y = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[p]] += self.vals[p] * xr;
            }
        }
    }
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// `y += a x`.
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
