//! Up-looking sparse Cholesky factorization `P K P^T = L L^T`.
//!
//! The symbolic phase (ordering, elimination tree, row patterns) runs once
//! per sparsity pattern; [`Symbolic::factor`] then refactors any matrix
//! whose pattern is contained in the analyzed one.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ordering::{nested_dissection, Graph};
use crate::sparse::SparseSym;
use crate::{Error, Result};

/// Ordering, elimination tree and the structure of `L`.
#[derive(Debug)]
pub struct Symbolic {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// `pinv[old] = new`
    pinv: Vec<usize>,
    /// Column pointers of `L` (diagonal stored first in each column).
    l_ptr: Vec<usize>,
    /// Row pattern of row `k` of `L` (strictly left of the diagonal), in
    /// topological order of the elimination tree.
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
}

/// Numeric factor sharing a [`Symbolic`] analysis.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    sym: Arc<Symbolic>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
}

impl Symbolic {
    /// Analyze the pattern of `pattern` (values are ignored).
    pub fn analyze(pattern: &SparseSym) -> Arc<Symbolic> {
        let n = pattern.dim();
        let g = Graph::from_edges(n, pattern.entries().map(|(r, c, _)| (r, c)));
        let perm = nested_dissection(&g);
        let mut pinv = alloc::vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }
        // upper part of the permuted pattern, by column
        let (c_ptr, c_idx) = permuted_upper_pattern(pattern, &pinv);
        // elimination tree
        let mut parent = alloc::vec![usize::MAX; n];
        let mut ancestor = alloc::vec![usize::MAX; n];
        for k in 0..n {
            for &i0 in &c_idx[c_ptr[k]..c_ptr[k + 1]] {
                let mut i = i0;
                while i != usize::MAX && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == usize::MAX {
                        parent[i] = k;
                    }
                    i = next;
                }
            }
        }
        // row patterns via elimination-tree reach
        let mut mark = alloc::vec![usize::MAX; n];
        let mut row_ptr = alloc::vec![0usize; n + 1];
        let mut row_idx = Vec::new();
        let mut col_count = alloc::vec![1usize; n];
        let mut stack = Vec::new();
        for k in 0..n {
            mark[k] = k;
            let start = row_idx.len();
            for &i0 in &c_idx[c_ptr[k]..c_ptr[k + 1]] {
                if i0 >= k {
                    continue;
                }
                let mut i = i0;
                stack.clear();
                while mark[i] != k {
                    stack.push(i);
                    mark[i] = k;
                    i = parent[i];
                }
                while let Some(v) = stack.pop() {
                    row_idx.push(v);
                }
            }
            // paths were appended ancestor-first; reversing the row puts
            // every descendant before its ancestors
            row_idx[start..].reverse();
            for &i in &row_idx[start..] {
                col_count[i] += 1;
            }
            row_ptr[k + 1] = row_idx.len();
        }
        let mut l_ptr = alloc::vec![0usize; n + 1];
        for j in 0..n {
            l_ptr[j + 1] = l_ptr[j] + col_count[j];
        }
        Arc::new(Symbolic {
            n,
            perm,
            pinv,
            l_ptr,
            row_ptr,
            row_idx,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L` including the diagonal.
    pub fn factor_nnz(&self) -> usize {
        self.l_ptr[self.n]
    }

    /// Numeric factorization of `k`, whose pattern must be contained in the
    /// analyzed pattern.
    pub fn factor(self: &Arc<Self>, k: &SparseSym) -> Result<SpdFactor> {
        let n = self.n;
        assert_eq!(k.dim(), n, "matrix dimension differs from analyzed pattern");
        let (c_ptr, c_idx, c_val) = permuted_upper(k, &self.pinv);
        let nnz = self.factor_nnz();
        let mut l_idx = alloc::vec![0usize; nnz];
        let mut l_val = alloc::vec![0.0f64; nnz];
        let mut fill: Vec<usize> = self.l_ptr[..n].to_vec();
        let mut x = alloc::vec![0.0f64; n];
        let mut scale = 0.0f64;
        for k in 0..n {
            let mut d = 0.0;
            for p in c_ptr[k]..c_ptr[k + 1] {
                let i = c_idx[p];
                if i == k {
                    d = c_val[p];
                } else {
                    x[i] = c_val[p];
                }
            }
            scale = scale.max(d.abs());
            for &i in &self.row_idx[self.row_ptr[k]..self.row_ptr[k + 1]] {
                let lki = x[i] / l_val[self.l_ptr[i]];
                x[i] = 0.0;
                for p in self.l_ptr[i] + 1..fill[i] {
                    x[l_idx[p]] -= l_val[p] * lki;
                }
                d -= lki * lki;
                let q = fill[i];
                assert!(q < self.l_ptr[i + 1], "pattern not contained in analysis");
                l_idx[q] = k;
                l_val[q] = lki;
                fill[i] += 1;
            }
            if !(d > 1e-14 * scale) || !d.is_finite() {
                return Err(Error::Factorization {
                    row: self.perm[k],
                    pivot: d,
                    k: None,
                });
            }
            l_idx[fill[k]] = k;
            l_val[fill[k]] = libm::sqrt(d);
            fill[k] += 1;
        }
        Ok(SpdFactor {
            sym: Arc::clone(self),
            l_idx,
            l_val,
        })
    }
}

impl SpdFactor {
    /// Analyze and factor in one step.
    pub fn new(k: &SparseSym) -> Result<SpdFactor> {
        Symbolic::analyze(k).factor(k)
    }

    pub fn dim(&self) -> usize {
        self.sym.n
    }

    /// Stored entries of `L`.
    pub fn fill(&self) -> usize {
        self.sym.factor_nnz()
    }

    pub fn symbolic(&self) -> &Arc<Symbolic> {
        &self.sym
    }

    /// Solve `K x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = alloc::vec![0.0; self.sym.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let s = &*self.sym;
        let n = s.n;
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = s.perm.iter().map(|&o| b[o]).collect();
        for j in 0..n {
            let p0 = s.l_ptr[j];
            y[j] /= self.l_val[p0];
            let yj = y[j];
            for p in p0 + 1..s.l_ptr[j + 1] {
                y[self.l_idx[p]] -= self.l_val[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let p0 = s.l_ptr[j];
            let mut acc = y[j];
            for p in p0 + 1..s.l_ptr[j + 1] {
                acc -= self.l_val[p] * y[self.l_idx[p]];
            }
            y[j] = acc / self.l_val[p0];
        }
        for (new, &old) in s.perm.iter().enumerate() {
            x[old] = y[new];
        }
    }
}

/// Columns of the upper triangle of `P K P^T` (pattern only).
fn permuted_upper_pattern(k: &SparseSym, pinv: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (ptr, idx, _) = permuted_upper(k, pinv);
    (ptr, idx)
}

/// Columns of the upper triangle of `P K P^T`: for column `j`, rows `i <= j`.
fn permuted_upper(k: &SparseSym, pinv: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let n = k.dim();
    let mut ptr = alloc::vec![0usize; n + 1];
    for (r, c, _) in k.entries() {
        let (a, b) = (pinv[r], pinv[c]);
        ptr[a.max(b) + 1] += 1;
    }
    for j in 0..n {
        ptr[j + 1] += ptr[j];
    }
    let mut next = ptr[..n].to_vec();
    let mut idx = alloc::vec![0usize; ptr[n]];
    let mut val = alloc::vec![0.0; ptr[n]];
    for (r, c, v) in k.entries() {
        let (a, b) = (pinv[r], pinv[c]);
        let col = a.max(b);
        idx[next[col]] = a.min(b);
        val[next[col]] = v;
        next[col] += 1;
    }
    (ptr, idx, val)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_grid(n: usize, shift: f64) -> SparseSym {
        let id = |i: usize, j: usize| i * n + j;
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                t.push((id(i, j), id(i, j), 4.0 + shift));
                if i + 1 < n {
                    t.push((id(i, j), id(i + 1, j), -1.0));
                }
                if j + 1 < n {
                    t.push((id(i, j), id(i, j + 1), -1.0));
                }
            }
        }
        SparseSym::from_triplets(n * n, t)
    }

    fn residual(k: &SparseSym, x: &[f64], b: &[f64]) -> f64 {
        let mut kx = alloc::vec![0.0; b.len()];
        k.matvec(x, &mut kx);
        let r: f64 = kx.iter().zip(b).map(|(a, b)| (a - b) * (a - b)).sum();
        libm::sqrt(r / b.iter().map(|v| v * v).sum::<f64>())
    }

    #[test]
    fn identity_solves_trivially() {
        let f = SpdFactor::new(&SparseSym::identity(5)).unwrap();
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(f.solve(&b), b.to_vec());
    }

    #[test]
    fn grid_laplacian_solve() {
        for n in [1, 2, 7, 30] {
            let k = laplace_grid(n, 0.0);
            let f = SpdFactor::new(&k).unwrap();
            let b: Vec<f64> = (0..n * n).map(|i| libm::cos(i as f64)).collect();
            assert!(residual(&k, &f.solve(&b), &b) < 1e-12);
        }
    }

    #[test]
    fn refactor_with_shared_symbolic() {
        let k = laplace_grid(12, 0.0);
        let sym = Symbolic::analyze(&k);
        let k2 = laplace_grid(12, 3.5);
        let f = sym.factor(&k2).unwrap();
        let b: Vec<f64> = (0..144).map(|i| (i % 7) as f64 - 3.0).collect();
        assert!(residual(&k2, &f.solve(&b), &b) < 1e-12);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let k = laplace_grid(6, -5.0);
        match SpdFactor::new(&k) {
            Err(Error::Factorization { pivot, .. }) => assert!(pivot <= 0.0),
            other => panic!("expected factorization error, got {other:?}"),
        }
    }
}
