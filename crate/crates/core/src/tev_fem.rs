//! Finite element search for transmission eigenvalues.
//!
//! For a trial wavenumber `k` the auxiliary problem `G_k v = C_k u` is
//! solved for every interior vector `u`, giving the symmetric form
//! `Q_k = K_u + C_k^T G_k^{-1} C_k`, the discrete `(L_k u, u)`. With the
//! regime sign `σ`, `f(k) = λ_min(σ Q_k, W)` is positive below the
//! Faber-Krahn bound and vanishes exactly at eigenvalues `k`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::assembly::FormSet;
use crate::eig::{dirichlet_eigs, lobpcg, EigOptions, SpdFactor, SymOperator, Symbolic};
use crate::mesh::Mesh;
use crate::params::MaterialParams;
use crate::sparse::SparseSym;
use crate::{Backend, Error, Result, RootKind, TevMeta, TevResult};

/// Inner product of the pencil `(σ Q_k, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `W = M_II`.
    Mass,
    /// `W = (S + M)_II`.
    H1,
}

/// Search controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemOptions {
    pub weight: Weight,
    pub eig: EigOptions,
    /// Scan grid spacing.
    pub scan_step: f64,
    /// Final bracket width.
    pub bisect_tol: f64,
    /// The scan starts at this fraction of the Faber-Krahn bound.
    pub floor_fraction: f64,
    /// Relative threshold (against the largest `|f|` on the scan) below
    /// which a local minimum without sign change is reported.
    pub near_tol: f64,
}

impl Default for FemOptions {
    fn default() -> Self {
        FemOptions {
            weight: Weight::Mass,
            eig: EigOptions::default(),
            scan_step: 0.05,
            bisect_tol: 1e-6,
            floor_fraction: 0.9,
            near_tol: 1e-3,
        }
    }
}

/// One evaluation of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FValue {
    pub k: f64,
    pub f: f64,
    /// Minimizing interior vector, `W`-normalized.
    pub vector: Vec<f64>,
    /// The full final eigensolver block, reused as a warm start.
    pub block: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
    /// False when the eigensolver stopped early on a negative Rayleigh
    /// quotient: `f` is then an upper bound and only its sign is exact.
    pub converged: bool,
}

/// `f` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignScan {
    pub k_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    /// Brackets `(k_i, k_{i+1})` with `f_i > 0 >= f_{i+1}` or
    /// `f_i <= 0 < f_{i+1}`.
    pub sign_changes: Vec<(f64, f64)>,
    /// Grid indices `i` where the step `f_{i+1} - f_i` exceeds ten times both
    /// neighbouring steps (suspected eigensolver misconvergence).
    pub jumps: Vec<usize>,
}

impl SignScan {
    fn from_values(k_grid: Vec<f64>, f_values: Vec<f64>) -> SignScan {
        let mut sign_changes = Vec::new();
        for i in 0..k_grid.len().saturating_sub(1) {
            if (f_values[i] > 0.0) != (f_values[i + 1] > 0.0) {
                sign_changes.push((k_grid[i], k_grid[i + 1]));
            }
        }
        let d: Vec<f64> = f_values.windows(2).map(|w| w[1] - w[0]).collect();
        let scale = f_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut jumps = Vec::new();
        for i in 1..d.len().saturating_sub(1) {
            let local = d[i - 1].abs().max(d[i + 1].abs());
            if d[i].abs() > 10.0 * local && d[i].abs() > 1e-6 * scale {
                jumps.push(i);
            }
        }
        SignScan {
            k_grid,
            f_values,
            sign_changes,
            jumps,
        }
    }

    /// First `+ -> -` bracket.
    pub fn first_descent(&self) -> Option<(f64, f64)> {
        let idx = (0..self.k_grid.len().saturating_sub(1)).find(|&i| self.f_values[i] > 0.0 && self.f_values[i + 1] <= 0.0)?;
        Some((self.k_grid[idx], self.k_grid[idx + 1]))
    }
}

/// Per-mesh solver state: forms, the shared symbolic analysis of `G_k`,
/// the pencil weight and its preconditioner.
#[derive(Debug)]
pub struct FemSolver {
    forms: FormSet,
    sigma: f64,
    level: u32,
    g_symbolic: Arc<Symbolic>,
    weight: SparseSym,
    precond: SpdFactor,
    lambda1: f64,
    opts: FemOptions,
}

/// The operator `u -> σ Q_k u` at one wavenumber.
pub struct LkOperator<'a> {
    solver: &'a FemSolver,
    pub k: f64,
    pub sigma: f64,
    /// `S_A - k^2 M_n` on the full node set.
    k_full: SparseSym,
    g_factor: SpdFactor,
}

impl LkOperator<'_> {
    /// `(Q u, (σ G)^{-1} C u)` for the unsigned `Q_k`.
    fn parts(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let f = &self.solver.forms;
        let eu = f.extend(u);
        let n = f.num_nodes();
        let mut cu = alloc::vec![0.0; n];
        self.k_full.matvec(&eu, &mut cu);
        let t = self.g_factor.solve(&cu);
        let mut ct = alloc::vec![0.0; n];
        self.k_full.matvec(&t, &mut ct);
        // Q u = E^T (C u + σ C^T (σG)^{-1} C u)
        let q: Vec<f64> = f.interior_nodes().iter().map(|&i| cu[i] + self.sigma * ct[i]).collect();
        (q, t)
    }

    /// Unsigned `Q_k u = K_u u + C^T G_k^{-1} C u`.
    pub fn apply_q(&self, u: &[f64]) -> Vec<f64> {
        self.parts(u).0
    }

    /// `v_u = G_k^{-1} C_k u` on the full node set.
    pub fn solve_aux(&self, u: &[f64]) -> Vec<f64> {
        let (_, t) = self.parts(u);
        t.into_iter().map(|x| self.sigma * x).collect()
    }

    /// The factorization of `σ G_k`.
    pub fn g_factor(&self) -> &SpdFactor {
        &self.g_factor
    }
}

impl SymOperator for LkOperator<'_> {
    fn dim(&self) -> usize {
        self.solver.forms.num_interior()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let q = self.apply_q(x);
        for (yi, qi) in y.iter_mut().zip(q) {
            *yi = self.sigma * qi;
        }
    }
}

impl FemSolver {
    /// Prepare the solver for `forms` assembled on a mesh of refinement
    /// `level`. Fails with a regime error when `σ` is undefined.
    pub fn new(forms: FormSet, level: u32, opts: FemOptions) -> Result<FemSolver> {
        let sigma = forms.require_regime()?;
        let g_symbolic = Symbolic::analyze(&SparseSym::pattern_union(&[&forms.s, &forms.s_a, &forms.m, &forms.b_eta]));
        let s_m = SparseSym::linear_combination(&[(1.0, &forms.s), (1.0, &forms.m)]);
        let h1 = forms.interior_block(&s_m);
        let precond = SpdFactor::new(&h1)?;
        let weight = match opts.weight {
            Weight::Mass => forms.interior_block(&forms.m),
            Weight::H1 => h1,
        };
        let lambda1 = dirichlet_eigs(&forms, false, 1)?[0];
        Ok(FemSolver {
            forms,
            sigma,
            level,
            g_symbolic,
            weight,
            precond,
            lambda1,
            opts,
        })
    }

    /// Assemble on `mesh` and prepare.
    pub fn from_mesh(mesh: &Mesh, params: &MaterialParams, allow_zero_eta: bool, opts: FemOptions) -> Result<FemSolver> {
        let forms = crate::assembly::assemble_with_override(mesh, params, allow_zero_eta);
        FemSolver::new(forms, mesh.level(), opts)
    }

    pub fn forms(&self) -> &FormSet {
        &self.forms
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn options(&self) -> &FemOptions {
        &self.opts
    }

    /// Smallest discrete Dirichlet eigenvalue of `-Δ` on the mesh.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Faber-Krahn bound evaluated with the discrete `λ_1`.
    pub fn faber_krahn(&self) -> Result<f64> {
        self.forms.regime().faber_krahn_bound(self.forms.params(), self.lambda1)
    }

    /// Default left end of the search range.
    pub fn k_floor(&self) -> Result<f64> {
        Ok(self.opts.floor_fraction * self.faber_krahn()?)
    }

    /// Build `σ Q_k`, factoring `σ G_k`.
    pub fn lk_operator(&self, k: f64) -> Result<LkOperator<'_>> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::Range { what: "k", value: k });
        }
        let g = self.forms.aux_matrix(k)?.scaled(self.sigma);
        let g_factor = self.g_symbolic.factor(&g).map_err(|e| e.at_wavenumber(k))?;
        Ok(LkOperator {
            solver: self,
            k,
            sigma: self.sigma,
            k_full: self.forms.rhs_full(k),
            g_factor,
        })
    }

    /// `v_u = G_k^{-1} C_k u`.
    pub fn solve_aux(&self, k: f64, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.lk_operator(k)?.solve_aux(u))
    }

    /// `f(k) = λ_min(σ Q_k, W)`, warm-started from an evaluation at a
    /// nearby wavenumber.
    pub fn f_of_k(&self, k: f64, warm: Option<&FValue>) -> Result<FValue> {
        let op = self.lk_operator(k)?;
        let guesses: Vec<&[f64]> = warm.map(|w| w.block.iter().map(Vec::as_slice).collect()).unwrap_or_default();
        let out = lobpcg(&op, &self.weight, Some(&self.precond), 1, &self.opts.eig, &guesses);
        let block = out.block;
        let best = out.pairs.into_iter().next().expect("one pair requested");
        // an unconverged Rayleigh quotient still bounds λ_min from above,
        // so a negative one settles the sign
        if !out.converged && !(best.value < 0.0) {
            return Err(Error::NoConvergence {
                iterations: best.iterations,
                best: best.value,
                residual: best.residual,
            });
        }
        Ok(FValue {
            k,
            f: best.value,
            vector: best.vector,
            block,
            residual: best.residual,
            iterations: best.iterations,
            converged: out.converged,
        })
    }

    /// Evaluate `f` along `grid`, each point warm-started from the last.
    pub fn scan(&self, grid: &[f64]) -> Result<SignScan> {
        self.scan_impl(grid, false)
    }

    /// Like [`FemSolver::scan`] but stops after the first `+ -> -` change.
    pub fn scan_until_descent(&self, grid: &[f64]) -> Result<SignScan> {
        self.scan_impl(grid, true)
    }

    fn scan_impl(&self, grid: &[f64], stop_at_descent: bool) -> Result<SignScan> {
        let mut values: Vec<f64> = Vec::with_capacity(grid.len());
        let mut warm: Option<FValue> = None;
        for &k in grid {
            let fv = self.f_of_k(k, warm.as_ref())?;
            let descent = values.last().is_some_and(|&prev| prev > 0.0) && fv.f <= 0.0;
            values.push(fv.f);
            warm = Some(fv);
            if stop_at_descent && descent {
                break;
            }
        }
        Ok(SignScan::from_values(grid[..values.len()].to_vec(), values))
    }

    /// Scan grid from `k_lo` (default: the Faber-Krahn floor) to `k_hi`.
    pub fn scan_grid(&self, k_lo: Option<f64>, k_hi: f64) -> Result<Vec<f64>> {
        let lo = match k_lo {
            Some(v) => v,
            None => self.k_floor()?,
        };
        if !(k_hi > lo) {
            return Err(Error::Config(alloc::format!(
                "tev_fem: k_hi = {k_hi} must exceed the scan start {lo}"
            )));
        }
        Ok(crate::disk::uniform_grid(lo, k_hi, self.opts.scan_step))
    }

    /// First `+ -> -` sign change of `f` in `[k_lo, k_hi]`, refined to a
    /// bracket of width `bisect_tol`.
    pub fn find_first_tev(&self, k_lo: Option<f64>, k_hi: f64) -> Result<TevResult> {
        let grid = self.scan_grid(k_lo, k_hi)?;
        let scan = self.scan_until_descent(&grid)?;
        self.check_start(&scan)?;
        match scan.first_descent() {
            Some(br) => self.refine_bracket(br),
            None => Err(Error::NoRootInRange {
                solver: "tev_fem",
                lo: grid[0],
                hi: k_hi,
            }),
        }
    }

    /// All sign changes of `f` in the range (ascending, at most
    /// `max_count`), plus flagged near-roots.
    pub fn find_tevs_in_range(&self, k_lo: Option<f64>, k_hi: f64, max_count: usize) -> Result<Vec<TevResult>> {
        let grid = self.scan_grid(k_lo, k_hi)?;
        let scan = self.scan(&grid)?;
        self.check_start(&scan)?;
        let mut out = Vec::new();
        for &br in &scan.sign_changes {
            out.push(self.refine_bracket(br)?);
        }
        let f = &scan.f_values;
        let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 1..f.len().saturating_sub(1) {
            let local_min = f[i] > 0.0 && f[i] <= f[i - 1] && f[i] <= f[i + 1];
            if local_min && f[i] < self.opts.near_tol * scale && f[i - 1] > 0.0 && f[i + 1] > 0.0 {
                out.push(TevResult {
                    k: grid[i],
                    backend: Backend::Fem,
                    bracket: (grid[i - 1], grid[i + 1]),
                    residual: f[i],
                    meta: TevMeta::Refinement(self.level),
                    kind: RootKind::NearRoot,
                });
            }
        }
        out.sort_by(|a, b| a.k.total_cmp(&b.k));
        out.truncate(max_count);
        Ok(out)
    }

    /// Locate the sign change nearest to a predicted `k` (from a coarser
    /// mesh): step outward with doubling steps until `f` changes sign,
    /// then refine. The left end never goes below `k_min`.
    pub fn track_root(&self, predicted: f64, k_min: f64, k_hi: f64) -> Result<TevResult> {
        let mut step = (0.01 * predicted).max(10.0 * self.opts.bisect_tol);
        let mid = self.f_of_k(predicted, None)?;
        let positive = mid.f > 0.0;
        let mut warm = mid;
        if positive {
            let (mut a, mut b) = (predicted, predicted + step);
            loop {
                if a >= k_hi {
                    return Err(Error::NoRootInRange {
                        solver: "tev_fem",
                        lo: predicted,
                        hi: k_hi,
                    });
                }
                b = b.min(k_hi);
                let fb = self.f_of_k(b, Some(&warm))?;
                if fb.f <= 0.0 {
                    return self.refine_bracket_from((a, b), warm, fb);
                }
                warm = fb;
                a = b;
                step *= 2.0;
                b = a + step;
            }
        } else {
            let (mut a, mut b) = (predicted - step, predicted);
            loop {
                a = a.max(k_min);
                let fa = self.f_of_k(a, Some(&warm))?;
                if fa.f > 0.0 {
                    return self.refine_bracket_from((a, b), fa, warm);
                }
                if a <= k_min {
                    return Err(Error::NotPositiveAtStart { k: a, value: fa.f });
                }
                warm = fa;
                b = a;
                step *= 2.0;
                a = b - step;
            }
        }
    }

    fn check_start(&self, scan: &SignScan) -> Result<()> {
        match (scan.k_grid.first(), scan.f_values.first()) {
            (Some(&k), Some(&v)) if !(v > 0.0) => Err(Error::NotPositiveAtStart { k, value: v }),
            _ => Ok(()),
        }
    }

    /// Brent's bracketing iteration on `f` over `(a, b)` with
    /// `f(a) > 0 >= f(b)` or the reverse; stops once the bracket is at most
    /// `bisect_tol` wide.
    pub fn refine_bracket(&self, (a0, b0): (f64, f64)) -> Result<TevResult> {
        let fa0 = self.f_of_k(a0, None)?;
        let fb0 = self.f_of_k(b0, Some(&fa0))?;
        self.refine_bracket_from((a0, b0), fa0, fb0)
    }

    /// [`FemSolver::refine_bracket`] with both end values already known.
    fn refine_bracket_from(&self, (a0, b0): (f64, f64), fa0: FValue, fb0: FValue) -> Result<TevResult> {
        let tol = self.opts.bisect_tol;
        let (mut a, mut fa, mut b, mut fb) = (a0, fa0.f, b0, fb0.f);
        let mut warm = fb0;
        if (fa > 0.0) == (fb > 0.0) {
            return Err(Error::NoRootInRange {
                solver: "tev_fem",
                lo: a0,
                hi: b0,
            });
        }
        let sign = |v: f64| v > 0.0;
        let (mut c, mut fc) = (a, fa);
        let mut d = b - a;
        let mut e = d;
        loop {
            if sign(fb) == sign(fc) {
                c = a;
                fc = fa;
                d = b - a;
                e = d;
            }
            if fc.abs() < fb.abs() {
                a = b;
                b = c;
                c = a;
                fa = fb;
                fb = fc;
                fc = fa;
            }
            let xm = 0.5 * (c - b);
            let tol1 = (0.5 * tol).max(4.0 * f64::EPSILON * b.abs());
            if xm.abs() <= tol1 || (c - b).abs() <= tol {
                break;
            }
            if e.abs() >= tol1 && fa.abs() > fb.abs() {
                let s = fb / fa;
                let (mut p, mut q);
                if a == c {
                    p = 2.0 * xm * s;
                    q = 1.0 - s;
                } else {
                    let qq = fa / fc;
                    let r = fb / fc;
                    p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                    q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
                }
                if p > 0.0 {
                    q = -q;
                }
                p = p.abs();
                if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                    e = d;
                    d = p / q;
                } else {
                    d = xm;
                    e = d;
                }
            } else {
                d = xm;
                e = d;
            }
            a = b;
            fa = fb;
            b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
            let fv = self.f_of_k(b, Some(&warm))?;
            fb = fv.f;
            warm = fv;
        }
        let (lo, hi) = if b < c { (b, c) } else { (c, b) };
        Ok(TevResult {
            k: 0.5 * (lo + hi),
            backend: Backend::Fem,
            bracket: (lo, hi),
            residual: fb.abs(),
            meta: TevMeta::Refinement(self.level),
            kind: RootKind::SignChange,
        })
    }
}

/// First eigenvalue on `coarse` and on each of `extra_levels` uniform
/// refinements: a full scan on the coarse mesh, then root tracking from
/// the previous level's value. Returns one result per level, coarse first.
pub fn multilevel_first_tev(
    coarse: &Mesh,
    params: &MaterialParams,
    allow_zero_eta: bool,
    extra_levels: u32,
    k_lo: Option<f64>,
    k_hi: f64,
    opts: FemOptions,
) -> Result<Vec<TevResult>> {
    let solver = FemSolver::from_mesh(coarse, params, allow_zero_eta, opts)?;
    let mut results = alloc::vec![solver.find_first_tev(k_lo, k_hi)?];
    let mut mesh = coarse.clone();
    for _ in 0..extra_levels {
        mesh = mesh.refine();
        let solver = FemSolver::from_mesh(&mesh, params, allow_zero_eta, opts)?;
        let prev = results.last().unwrap().k;
        let k_min = match k_lo {
            Some(v) => v,
            None => solver.k_floor()?,
        };
        results.push(solver.track_root(prev, k_min, k_hi)?);
    }
    Ok(results)
}
