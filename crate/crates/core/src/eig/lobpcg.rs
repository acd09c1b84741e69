//! Locally optimal block preconditioned conjugate gradient iteration for
//! the smallest eigenpairs of a symmetric pencil `(Q, W)`, `W` SPD.
//!
//! New search directions are orthogonalized before `Q` and `W` are applied,
//! so their images are exact; conjugate directions are formed and
//! orthonormalized in the coefficient space of the Rayleigh-Ritz basis.

use alloc::vec::Vec;

use super::dense::sym_eigen;
use crate::sparse::{axpy, dot, norm};
use crate::{Error, Result};

/// A symmetric linear operator known only through its action.
pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOperator for crate::sparse::SparseSym {
    fn dim(&self) -> usize {
        crate::sparse::SparseSym::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

impl SymOperator for crate::sparse::Csr {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// The inverse of a factored SPD matrix, used as a preconditioner.
impl SymOperator for super::SpdFactor {
    fn dim(&self) -> usize {
        super::SpdFactor::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.solve_into(x, y)
    }
}

/// Iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    /// Relative residual target: `‖Qv - λWv‖ <= tol·max(1,|λ|)·‖Wv‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra block vectors beyond the number requested.
    pub guard: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            tol: 1e-8,
            max_iter: 400,
            guard: 3,
        }
    }
}

/// One eigenpair of the pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub value: f64,
    /// `W`-normalized: `v^T W v = 1`.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `‖Qv - λWv‖ / ‖Wv‖`.
    pub residual: f64,
}

/// Final state of an iteration, converged or not.
#[derive(Debug, Clone, PartialEq)]
pub struct EigOutcome {
    /// Current Ritz pairs, ascending; Rayleigh quotients never increase
    /// over the iteration.
    pub pairs: Vec<EigResult>,
    pub converged: bool,
    /// All Ritz vectors of the final block, ascending; a warm start for a
    /// nearby pencil.
    pub block: Vec<Vec<f64>>,
}

/// Smallest eigenpair of `(Q, W)`, optionally preconditioned by `T ≈ Q^{-1}`
/// and started from `guess`.
pub fn smallest_eig(
    q: &dyn SymOperator,
    w: &dyn SymOperator,
    precond: Option<&dyn SymOperator>,
    opts: &EigOptions,
    guess: Option<&[f64]>,
) -> Result<EigResult> {
    let guesses: Vec<&[f64]> = guess.into_iter().collect();
    let mut v = smallest_eigs(q, w, precond, 1, opts, &guesses)?;
    Ok(v.swap_remove(0))
}

/// The `count` smallest eigenpairs of `(Q, W)`, ascending.
pub fn smallest_eigs(
    q: &dyn SymOperator,
    w: &dyn SymOperator,
    precond: Option<&dyn SymOperator>,
    count: usize,
    opts: &EigOptions,
    guesses: &[&[f64]],
) -> Result<Vec<EigResult>> {
    let out = lobpcg(q, w, precond, count, opts, guesses);
    if out.converged {
        Ok(out.pairs)
    } else {
        let first = &out.pairs[0];
        Err(Error::NoConvergence {
            iterations: first.iterations,
            best: first.value,
            residual: first.residual,
        })
    }
}

/// Run the iteration and return the last Ritz pairs whether or not they
/// met the tolerance.
pub fn lobpcg(
    q: &dyn SymOperator,
    w: &dyn SymOperator,
    precond: Option<&dyn SymOperator>,
    count: usize,
    opts: &EigOptions,
    guesses: &[&[f64]],
) -> EigOutcome {
    let n = q.dim();
    assert!(count >= 1, "at least one eigenpair must be requested");
    assert!(count <= n, "more eigenpairs requested than the dimension");
    assert_eq!(w.dim(), n);
    let bs = (count + opts.guard).min(n);
    let ops = Ops { q, w, t: precond, n };

    // initial block: guesses, then deterministic pseudo-random fill
    let mut rng = 0x9E37_79B9_7F4A_7C15u64;
    let mut x = Block::default();
    let mut candidates: Vec<Vec<f64>> = guesses.iter().filter(|g| g.len() == n).take(bs).map(|g| g.to_vec()).collect();
    candidates.reverse();
    let mut attempts = 0;
    while x.len() < bs && attempts < 10 * bs + 10 {
        attempts += 1;
        let c = candidates.pop().unwrap_or_else(|| {
            (0..n)
                .map(|_| {
                    rng ^= rng << 13;
                    rng ^= rng >> 7;
                    rng ^= rng << 17;
                    (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect()
        });
        ops.add_direction(&mut x, c);
    }
    let bs = x.len();
    let (vals, y) = ritz(&x).expect("initial block is W-orthonormal");
    let mut lambda: Vec<f64> = vals[..bs].to_vec();
    x = x.combine_columns(&y[..bs]);
    let mut p = Block::default();
    let mut residuals = alloc::vec![f64::INFINITY; bs];
    let mut iterations = 0;
    let mut converged = false;
    for iter in 0..=opts.max_iter {
        iterations = iter;
        let mut pending = Vec::new();
        for i in 0..bs {
            let mut r = x.q[i].clone();
            axpy(-lambda[i], &x.w[i], &mut r);
            let nw = norm(&x.w[i]);
            let nr = norm(&r);
            residuals[i] = if nw > 0.0 { nr / nw } else { nr };
            if residuals[i] > opts.tol * lambda[i].abs().max(1.0) {
                pending.push(r);
            }
        }
        if (0..count).all(|i| residuals[i] <= opts.tol * lambda[i].abs().max(1.0)) {
            converged = true;
            break;
        }
        if iter == opts.max_iter {
            break;
        }
        let mut basis = x.clone();
        basis.append(&p);
        let before = basis.len();
        for r in pending {
            ops.add_direction(&mut basis, ops.apply_t(&r));
        }
        if basis.len() == before && p.len() == 0 {
            // nothing left to explore
            break;
        }
        let (vals, y) = match ritz(&basis) {
            Some(r) => r,
            None => {
                // Gram matrix lost definiteness: restart without P
                p = Block::default();
                continue;
            }
        };
        lambda = vals[..bs].to_vec();
        let nx = x.len();
        let gram = basis.gram();
        let mut x_new = basis.combine_columns(&y[..bs]);
        if iter % 20 == 19 {
            for i in 0..bs {
                x_new.q[i] = ops.apply(ops.q, &x_new.v[i]);
            }
        }
        // conjugate directions: Ritz coefficients outside the old X,
        // G-orthonormalized against the new X in coefficient space
        let mut z: Vec<Vec<f64>> = Vec::new();
        for yi in &y[..bs] {
            let mut c = yi.clone();
            c[..nx].iter_mut().for_each(|v| *v = 0.0);
            let n0 = libm::sqrt(quad(&gram, &c, &c).max(0.0));
            if !(n0 > 0.0) {
                continue;
            }
            for _ in 0..2 {
                for b in y[..bs].iter().chain(z.iter()) {
                    let h = quad(&gram, b, &c);
                    axpy(-h, b, &mut c);
                }
            }
            let nc = libm::sqrt(quad(&gram, &c, &c).max(0.0));
            if nc > 1e-10 * n0 {
                c.iter_mut().for_each(|v| *v /= nc);
                z.push(c);
            }
        }
        p = basis.combine_columns(&z);
        x = x_new;
    }
    let pairs = (0..count)
        .map(|i| EigResult {
            value: lambda[i],
            vector: x.v[i].clone(),
            iterations,
            residual: residuals[i],
        })
        .collect();
    EigOutcome {
        pairs,
        converged,
        block: x.v,
    }
}

/// `a^T G b`.
fn quad(g: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    g.iter().zip(a).map(|(row, ai)| ai * dot(row, b)).sum()
}

/// Rayleigh-Ritz on `basis`: eigenvalues and `G`-orthonormal coefficient
/// vectors of `(V^T Q V, V^T W V)`, ascending. `None` if the Gram matrix is
/// not numerically positive definite.
fn ritz(basis: &Block) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = basis.len();
    let g = basis.gram();
    let mut h = alloc::vec![alloc::vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let a = 0.5 * (dot(&basis.v[i], &basis.q[j]) + dot(&basis.v[j], &basis.q[i]));
            h[i][j] = a;
            h[j][i] = a;
        }
    }
    let l = dense_cholesky(&g)?;
    // A = L^{-1} H L^{-T}
    let mut a = alloc::vec![alloc::vec![0.0; m]; m];
    // columns of B = L^{-1} H, then rows of A = L^{-1} B^T
    let cols: Vec<Vec<f64>> = (0..m).map(|j| lower_solve(&l, &h[j])).collect();
    for i in 0..m {
        let row: Vec<f64> = (0..m).map(|j| cols[j][i]).collect();
        a[i] = lower_solve(&l, &row);
    }
    let (vals, zs) = sym_eigen(&a);
    let ys = zs.iter().map(|z| upper_solve(&l, z)).collect();
    Some((vals, ys))
}

fn dense_cholesky(g: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let m = g.len();
    let mut l = alloc::vec![alloc::vec![0.0; m]; m];
    for j in 0..m {
        let mut d = g[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 1e-14 * g[j][j].abs().max(f64::MIN_POSITIVE)) {
            return None;
        }
        let d = libm::sqrt(d);
        l[j][j] = d;
        for i in j + 1..m {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    Some(l)
}

/// Solve `L x = b`.
fn lower_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = l.len();
    let mut x = b.to_vec();
    for i in 0..m {
        for k in 0..i {
            x[i] -= l[i][k] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

/// Solve `L^T x = b`.
fn upper_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = l.len();
    let mut x = b.to_vec();
    for i in (0..m).rev() {
        for k in i + 1..m {
            x[i] -= l[k][i] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

/// Vectors with their `W` and `Q` images.
#[derive(Debug, Clone, Default)]
struct Block {
    v: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

impl Block {
    fn len(&self) -> usize {
        self.v.len()
    }

    fn append(&mut self, other: &Block) {
        self.v.extend(other.v.iter().cloned());
        self.w.extend(other.w.iter().cloned());
        self.q.extend(other.q.iter().cloned());
    }

    /// `V^T W V`, symmetrized.
    fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        let mut g = alloc::vec![alloc::vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let a = 0.5 * (dot(&self.v[i], &self.w[j]) + dot(&self.v[j], &self.w[i]));
                g[i][j] = a;
                g[j][i] = a;
            }
        }
        g
    }

    /// One output column `sum_j c[j] * self[j]` per coefficient vector.
    fn combine_columns(&self, coeffs: &[Vec<f64>]) -> Block {
        let mut out = Block::default();
        if self.len() == 0 {
            return out;
        }
        let n = self.v[0].len();
        for c in coeffs {
            let (mut v, mut w, mut q) = (alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n]);
            for (j, &cj) in c.iter().enumerate() {
                if cj != 0.0 {
                    axpy(cj, &self.v[j], &mut v);
                    axpy(cj, &self.w[j], &mut w);
                    axpy(cj, &self.q[j], &mut q);
                }
            }
            out.v.push(v);
            out.w.push(w);
            out.q.push(q);
        }
        out
    }
}

struct Ops<'a> {
    q: &'a dyn SymOperator,
    w: &'a dyn SymOperator,
    t: Option<&'a dyn SymOperator>,
    n: usize,
}

impl Ops<'_> {
    fn apply(&self, op: &dyn SymOperator, x: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.n];
        op.apply(x, &mut y);
        y
    }

    fn apply_t(&self, x: &[f64]) -> Vec<f64> {
        match self.t {
            Some(t) => self.apply(t, x),
            None => x.to_vec(),
        }
    }

    /// `W`-orthogonalize `v` against `basis` (two passes), normalize, and
    /// append it with freshly computed images. Returns false when `v` is
    /// numerically dependent on the basis.
    fn add_direction(&self, basis: &mut Block, mut v: Vec<f64>) -> bool {
        let w0 = self.apply(self.w, &v);
        let n0 = libm::sqrt(dot(&v, &w0).max(0.0));
        if !(n0 > 0.0) || !n0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for j in 0..basis.len() {
                let c = dot(&basis.w[j], &v);
                axpy(-c, &basis.v[j], &mut v);
            }
        }
        let mut wv = self.apply(self.w, &v);
        let nv = libm::sqrt(dot(&v, &wv).max(0.0));
        if !(nv > 1e-8 * n0) {
            return false;
        }
        let s = 1.0 / nv;
        v.iter_mut().for_each(|x| *x *= s);
        wv.iter_mut().for_each(|x| *x *= s);
        let qv = self.apply(self.q, &v);
        basis.v.push(v);
        basis.w.push(wv);
        basis.q.push(qv);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseSym;

    fn diag(v: &[f64]) -> SparseSym {
        SparseSym::from_triplets(v.len(), v.iter().enumerate().map(|(i, &x)| (i, i, x)).collect())
    }

    fn path_laplacian(n: usize) -> SparseSym {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SparseSym::from_triplets(n, t)
    }

    #[test]
    fn equal_pencil_gives_one() {
        let w = diag(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let r = smallest_eig(&w, &w, None, &EigOptions::default(), None).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((w.bilinear(&r.vector, &r.vector) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_laplacian_spectrum() {
        let n = 200;
        let q = path_laplacian(n);
        let w = SparseSym::identity(n);
        let t = super::super::SpdFactor::new(&q).unwrap();
        let opts = EigOptions::default();
        let r = smallest_eigs(&q, &w, Some(&t), 3, &opts, &[]).unwrap();
        for (j, e) in r.iter().enumerate() {
            let s = libm::sin((j + 1) as f64 * core::f64::consts::PI / (2.0 * (n + 1) as f64));
            let exact = 4.0 * s * s;
            assert!((e.value - exact).abs() < 1e-9 * exact.max(1.0), "{j}: {} vs {exact}", e.value);
        }
    }

    #[test]
    fn indefinite_pencil_and_no_convergence() {
        let q = SparseSym::from_triplets(3, alloc::vec![(0, 0, -2.0), (1, 1, 1.0), (2, 2, 3.0), (0, 1, 0.5)]);
        let w = diag(&[1.0, 1.0, 2.0]);
        let r = smallest_eig(&q, &w, None, &EigOptions::default(), None).unwrap();
        let exact = -0.5 - libm::sqrt(9.0 + 1.0) / 2.0;
        assert!((r.value - exact).abs() < 1e-10);
        let n = 400;
        let q = path_laplacian(n);
        let opts = EigOptions {
            max_iter: 2,
            ..EigOptions::default()
        };
        match smallest_eig(&q, &SparseSym::identity(n), None, &opts, None) {
            Err(Error::NoConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 2);
                assert!(best > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
