//! Exact transmission eigenvalues on the unit disk for `A = a I`.
//!
//! Separation of variables reduces the problem to the roots of
//!
//! ```text
//! d_m(k) = det | J_m(s k)               -J_m(k)                  |
//!              | k sqrt(n a) J'_m(s k)   -[k J'_m(k) + eta J_m(k)] |,   s = sqrt(n / a)
//! ```
//!
//! for some mode `m >= 0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::{classify_with_override, MaterialParams};
use crate::specialfn::{bessel_eval, bessel_j};
use crate::{Backend, RootKind, TevMeta, TevResult};

/// First zero of `J_0`; `j01^2` is the first Dirichlet eigenvalue of the disk.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Relative size of `d_m` against its two products below which the
/// determinant is treated as cancelling exactly.
const DEGENERATE_RTOL: f64 = 1e-14;

/// Both products of the determinant, `d_m = first - second`.
fn det_terms(m: u32, k: f64, a: f64, n: f64, eta: f64) -> Result<(f64, f64)> {
    let s = libm::sqrt(n / a);
    let inner = bessel_eval(m, s * k)?;
    let outer = bessel_eval(m, k)?;
    let first = inner.value * -(k * outer.derivative + eta * outer.value);
    let second = -outer.value * (k * libm::sqrt(n * a) * inner.derivative);
    Ok((first, second))
}

fn scalar_a(params: &MaterialParams) -> Result<f64> {
    params.a_matrix().as_scalar().ok_or(Error::Shape)
}

/// `d_m(k)` expanded exactly as the 2x2 determinant.
pub fn det_dm(m: u32, k: f64, params: &MaterialParams) -> Result<f64> {
    let a = scalar_a(params)?;
    let (first, second) = det_terms(m, k, a, params.n(), params.eta())?;
    Ok(first - second)
}

/// `d_m` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    pub m: u32,
    pub step: f64,
    pub k_grid: Vec<f64>,
    pub values: Vec<f64>,
    degenerate: bool,
}

impl DetCurve {
    /// Sample `d_m` at `k_lo, k_lo + step, ...` up to and including `k_hi`.
    pub fn sample(m: u32, params: &MaterialParams, k_lo: f64, k_hi: f64, step: f64) -> Result<Self> {
        let a = scalar_a(params)?;
        if !(step > 0.0) || !(k_hi > k_lo) || !(k_lo > 0.0) {
            return Err(Error::Config(alloc::format!("disk: bad scan grid [{k_lo}, {k_hi}] step {step}")));
        }
        let grid = uniform_grid(k_lo, k_hi, step);
        let mut values = Vec::with_capacity(grid.len());
        let mut degenerate = true;
        for &k in &grid {
            let (first, second) = det_terms(m, k, a, params.n(), params.eta())?;
            let d = first - second;
            let scale = libm::fabs(first) + libm::fabs(second);
            if libm::fabs(d) > DEGENERATE_RTOL * scale {
                degenerate = false;
            }
            values.push(d);
        }
        Ok(DetCurve {
            m,
            step,
            k_grid: grid,
            values,
            degenerate,
        })
    }

    /// True when the two products cancel to rounding at every node.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Grid cells `(i, i + 1)` across which the sign flips. Non-finite
    /// samples never bracket anything.
    pub fn sign_changes(&self) -> Vec<usize> {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].is_finite() && w[1].is_finite())
            .filter(|(_, w)| (w[0] > 0.0 && w[1] <= 0.0) || (w[0] < 0.0 && w[1] >= 0.0))
            .map(|(i, _)| i)
            .collect()
    }
}

/// `k_lo, k_lo + h, ...`, ending exactly at `k_hi`.
pub(crate) fn uniform_grid(k_lo: f64, k_hi: f64, step: f64) -> Vec<f64> {
    let cells = libm::ceil((k_hi - k_lo) / step - 1e-9).max(1.0) as usize;
    let mut grid: Vec<f64> = (0..cells).map(|i| k_lo + i as f64 * step).collect();
    grid.push(k_hi);
    grid
}

/// Knobs for the analytic root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSearch {
    /// Left end of the scan; `None` means 90% of the Faber-Krahn bound.
    pub k_floor: Option<f64>,
    pub k_max: f64,
    pub grid_step: f64,
    /// Final bracket width.
    pub tol: f64,
    /// Permit `eta = 0` (the limit problem) when deriving the floor.
    pub allow_zero_eta: bool,
}

impl Default for DiskSearch {
    fn default() -> Self {
        DiskSearch {
            k_floor: None,
            k_max: 10.0,
            grid_step: 0.01,
            tol: 1e-12,
            allow_zero_eta: false,
        }
    }
}

/// Smallest admissible `k` for the scan.
const K_EPSILON: f64 = 1e-3;
/// Fraction of the Faber-Krahn bound where scans start.
pub const FLOOR_FRACTION: f64 = 0.9;

impl DiskSearch {
    pub fn floor(&self, params: &MaterialParams) -> Result<f64> {
        if let Some(floor) = self.k_floor {
            return Ok(floor.max(K_EPSILON));
        }
        let regime = classify_with_override(params, self.allow_zero_eta);
        let bound = regime.faber_krahn_bound(params, J0_FIRST_ZERO * J0_FIRST_ZERO)?;
        Ok((FLOOR_FRACTION * bound).max(K_EPSILON))
    }
}

fn common_zero(m: u32, k: f64, params: &MaterialParams, a: f64) -> Result<bool> {
    const ZERO_TOL: f64 = 1e-8;
    let s = libm::sqrt(params.n() / a);
    Ok(libm::fabs(bessel_j(m, k)?) <= ZERO_TOL && libm::fabs(bessel_j(m, s * k)?) <= ZERO_TOL)
}

fn bisect_cell(m: u32, params: &MaterialParams, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut f_lo = det_dm(m, lo, params)?;
    if f_lo == 0.0 {
        return Ok((lo - 0.5 * tol, lo + 0.5 * tol));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = det_dm(m, mid, params)?;
        if f_mid == 0.0 {
            return Ok((mid - 0.5 * tol, mid + 0.5 * tol));
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Every bracketed root of `d_m` in `[floor, k_max]`, ascending.
pub fn roots(m: u32, params: &MaterialParams, search: &DiskSearch) -> Result<Vec<TevResult>> {
    let a = scalar_a(params)?;
    let floor = search.floor(params)?;
    if floor >= search.k_max {
        return Err(Error::NoRootInRange {
            solver: "disk",
            lo: floor,
            hi: search.k_max,
        });
    }
    let curve = DetCurve::sample(m, params, floor, search.k_max, search.grid_step)?;
    if curve.is_degenerate() {
        return Err(Error::DegenerateMedium { m });
    }
    let mut out = Vec::new();
    for i in curve.sign_changes() {
        let (lo, hi) = bisect_cell(m, params, curve.k_grid[i], curve.k_grid[i + 1], search.tol)?;
        let k = 0.5 * (lo + hi);
        if common_zero(m, k, params, a)? {
            continue;
        }
        out.push(TevResult {
            k,
            backend: Backend::Analytic { m },
            bracket: (lo, hi),
            residual: libm::fabs(det_dm(m, k, params)?),
            meta: TevMeta::GridStep(search.grid_step),
            kind: RootKind::SignChange,
        });
    }
    Ok(out)
}

/// First root of `d_m` above the scan floor.
pub fn first_root(m: u32, params: &MaterialParams, search: &DiskSearch) -> Result<TevResult> {
    let floor = search.floor(params)?;
    roots(m, params, search)?.into_iter().next().ok_or(Error::NoRootInRange {
        solver: "disk",
        lo: floor,
        hi: search.k_max,
    })
}

/// Union of the roots of `d_0 .. d_{m_max}` in the scan range, sorted, with
/// values closer than `2 tol` merged (the lower mode is kept).
pub fn tev_spectrum(params: &MaterialParams, m_max: u32, search: &DiskSearch) -> Result<Vec<TevResult>> {
    let mut all = Vec::new();
    let mut degenerate = 0;
    for m in 0..=m_max {
        match roots(m, params, search) {
            Ok(r) => all.extend(r),
            Err(Error::DegenerateMedium { .. }) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    if degenerate == m_max + 1 {
        return Err(Error::DegenerateMedium { m: 0 });
    }
    Ok(merge_modes(all, 2.0 * search.tol))
}

/// Sort by `k` and drop entries within `merge_tol` of an earlier one.
pub fn merge_modes(mut all: Vec<TevResult>, merge_tol: f64) -> Vec<TevResult> {
    all.sort_by(|x, y| x.k.total_cmp(&y.k).then_with(|| mode(x).cmp(&mode(y))));
    let mut merged: Vec<TevResult> = Vec::with_capacity(all.len());
    for r in all {
        match merged.last_mut() {
            Some(prev) if libm::fabs(r.k - prev.k) <= merge_tol => {
                if mode(&r) < mode(prev) {
                    *prev = r;
                }
            }
            _ => merged.push(r),
        }
    }
    merged
}

fn mode(r: &TevResult) -> u32 {
    match r.backend {
        Backend::Analytic { m } => m,
        Backend::Fem => u32::MAX,
    }
}

/// Dirichlet eigenvalues `j_{m,s}^2` of `-Laplace` on the unit disk, the
/// smallest `count` distinct values in ascending order.
pub fn dirichlet_eigenvalues(count: usize) -> Result<Vec<f64>> {
    // j_{m,1} > m, so order m only matters when m is below the largest zero
    // considered; grow the window until `count` values are certain.
    let mut k_max = 8.0;
    loop {
        let mut zeros = Vec::new();
        let mut m = 0u32;
        while (m as f64) < k_max && m <= crate::specialfn::MAX_ORDER {
            let mut k = (m as f64).max(0.5);
            let step = 0.02;
            let mut prev = bessel_j(m, k)?;
            while k < k_max {
                let next_k = (k + step).min(k_max);
                let next = bessel_j(m, next_k)?;
                if prev != 0.0 && (prev > 0.0) != (next > 0.0) {
                    let (mut lo, mut hi, mut f_lo) = (k, next_k, prev);
                    while hi - lo > 1e-14 * hi {
                        let mid = 0.5 * (lo + hi);
                        let f_mid = bessel_j(m, mid)?;
                        if (f_mid > 0.0) == (f_lo > 0.0) {
                            lo = mid;
                            f_lo = f_mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let z = 0.5 * (lo + hi);
                    zeros.push(z * z);
                }
                prev = next;
                k = next_k;
            }
            m += 1;
        }
        zeros.sort_by(f64::total_cmp);
        if zeros.len() >= count {
            zeros.truncate(count);
            return Ok(zeros);
        }
        k_max *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(a: f64, n: f64, eta: f64) -> MaterialParams {
        MaterialParams::isotropic(a, n, eta).unwrap()
    }

    #[test]
    fn identity_medium_is_degenerate() {
        let p = iso(1.0, 1.0, 0.0);
        for m in 0..4 {
            for i in 1..50 {
                assert_eq!(det_dm(m, i as f64 * 0.2, &p).unwrap(), 0.0);
            }
        }
        let search = DiskSearch {
            k_floor: Some(0.1),
            ..DiskSearch::default()
        };
        assert!(matches!(first_root(0, &p, &search), Err(Error::DegenerateMedium { m: 0 })));
        assert!(matches!(tev_spectrum(&p, 5, &search), Err(Error::DegenerateMedium { .. })));
    }

    #[test]
    fn anisotropic_matrix_rejected() {
        let p = MaterialParams::new(crate::SymMat2::new(0.4, 0.1, 0.4), 3.0, 1.0).unwrap();
        assert_eq!(det_dm(0, 1.0, &p), Err(Error::Shape));
    }

    #[test]
    fn neither_regime_needs_a_floor() {
        let p = iso(0.4, 3.0, 0.0);
        assert!(matches!(first_root(0, &p, &DiskSearch::default()), Err(Error::Regime(_))));
        let search = DiskSearch {
            allow_zero_eta: true,
            ..DiskSearch::default()
        };
        let r = first_root(0, &p, &search).unwrap();
        assert!(libm::fabs(r.k - 1.7950) < 5e-4, "{}", r.k);
    }

    #[test]
    fn determinant_roots_match_printed_values() {
        let r = first_root(0, &iso(0.4, 3.0, 1.0), &DiskSearch::default()).unwrap();
        assert!(libm::fabs(r.k - 1.6010) < 5e-4);
        assert!(r.bracket.0 < r.k && r.k < r.bracket.1);
        let r = first_root(0, &iso(3.0, 0.7, -1.0), &DiskSearch::default()).unwrap();
        assert!(libm::fabs(r.k - 5.8032) < 5e-4);
        let r = first_root(0, &iso(0.4, 3.0, 1.0 / 512.0), &DiskSearch::default()).unwrap();
        assert!(libm::fabs(r.k - 1.7948) < 5e-4);
        let r = first_root(0, &iso(3.0, 0.7, -512.0), &DiskSearch::default()).unwrap();
        assert!(libm::fabs(r.k - 2.4095) < 5e-4);
    }

    #[test]
    fn no_root_below_small_ceiling() {
        let search = DiskSearch {
            k_max: 1.2,
            ..DiskSearch::default()
        };
        assert!(matches!(
            first_root(0, &iso(0.4, 3.0, 1.0), &search),
            Err(Error::NoRootInRange { .. })
        ));
    }

    #[test]
    fn spectrum_contains_mode_zero_root_and_is_sorted() {
        let search = DiskSearch {
            k_max: 1.7,
            ..DiskSearch::default()
        };
        let spec = tev_spectrum(&iso(0.4, 3.0, 1.0), 10, &search).unwrap();
        assert!(spec
            .iter()
            .any(|r| r.backend == Backend::Analytic { m: 0 } && libm::fabs(r.k - 1.6010) < 5e-4));
        assert!(spec.windows(2).all(|w| w[0].k < w[1].k));

        let spec = tev_spectrum(&iso(0.4, 3.0, 512.0), 6, &DiskSearch::default()).unwrap();
        assert!(libm::fabs(spec[0].k - 0.8788) < 5e-4, "{}", spec[0].k);
    }

    #[test]
    fn merge_keeps_lower_mode() {
        let mk = |k: f64, m: u32| TevResult {
            k,
            backend: Backend::Analytic { m },
            bracket: (k - 1e-9, k + 1e-9),
            residual: 0.0,
            meta: TevMeta::GridStep(0.01),
            kind: RootKind::SignChange,
        };
        let merged = merge_modes(alloc::vec![mk(2.0, 3), mk(1.0, 0), mk(2.0 + 1e-13, 1)], 2e-12);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[1].backend, Backend::Analytic { m: 1 });
    }

    #[test]
    fn disk_dirichlet_eigenvalues() {
        let ev = dirichlet_eigenvalues(4).unwrap();
        let expect = [2.404825557695773, 3.831705970207512, 5.135622301840683, 5.520078110286311];
        for (v, z) in ev.iter().zip(expect) {
            assert!(libm::fabs(libm::sqrt(*v) - z) < 1e-10);
        }
    }

    #[test]
    fn grid_ends_at_ceiling() {
        let g = uniform_grid(1.0, 2.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 2.0);
        let g = uniform_grid(1.0, 2.0, 0.25);
        assert_eq!(g.len(), 5);
    }
}
