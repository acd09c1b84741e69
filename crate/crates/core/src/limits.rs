//! Convergence bookkeeping for the conductivity limits `η -> 0` and
//! `η -> ±∞`: estimated orders of convergence, branch splits, and
//! identification of limits among Dirichlet candidates.

use alloc::vec::Vec;

/// Round `x` to `digits` decimal places.
pub fn round_to(x: f64, digits: u32) -> f64 {
    let s = libm::pow(10.0, digits as f64);
    libm::round(x * s) / s
}

/// `log2(|k_prev - k_ref| / |k_next - k_ref|)`, or `None` when either
/// distance is at or below `floor`.
pub fn eoc(k_prev: f64, k_next: f64, k_ref: f64, floor: f64) -> Option<f64> {
    let (e0, e1) = (libm::fabs(k_prev - k_ref), libm::fabs(k_next - k_ref));
    if e0 <= floor || e1 <= floor {
        return None;
    }
    Some(libm::log2(e0 / e1))
}

/// How the values are prepared before the rate is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRule {
    /// Round `k` and the reference to this many decimals first.
    pub digits: Option<u32>,
    /// Distances at or below this are treated as converged.
    pub floor: f64,
}

impl Default for EocRule {
    fn default() -> Self {
        Self {
            digits: Some(4),
            floor: 0.0,
        }
    }
}

impl EocRule {
    fn prep(&self, x: f64) -> f64 {
        self.digits.map_or(x, |d| round_to(x, d))
    }

    /// EOC column for `k` against one reference: entry 0 is `None`, entry
    /// `p` compares rows `p - 1` and `p`.
    pub fn column(&self, k: &[f64], k_ref: f64) -> Vec<Option<f64>> {
        let r = self.prep(k_ref);
        let mut out = alloc::vec![None; k.len()];
        for p in 1..k.len() {
            out[p] = eoc(self.prep(k[p - 1]), self.prep(k[p]), r, self.floor);
        }
        out
    }
}

/// Start indices of the branches of a limit sequence. A new branch begins
/// where a step exceeds `factor` times the previous step and `rel` times the
/// current value.
pub fn branch_starts(k: &[f64], factor: f64, rel: f64) -> Vec<usize> {
    let mut starts = alloc::vec![0];
    if k.is_empty() {
        return starts;
    }
    let mut prev_step: Option<f64> = None;
    for p in 1..k.len() {
        let step = libm::fabs(k[p] - k[p - 1]);
        let jump = match prev_step {
            Some(s) => step > factor * s && step > rel * libm::fabs(k[p - 1]),
            None => false,
        };
        if jump {
            starts.push(p);
            prev_step = None;
        } else {
            prev_step = Some(step);
        }
    }
    starts
}

/// Which Dirichlet spectrum a limit candidate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `sqrt(λ_j)` of `-Δ`.
    Laplacian,
    /// `sqrt(λ_j a / n)` of `-n^{-1} ∇·A∇`.
    Weighted,
}

/// A possible limit `k_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub value: f64,
    /// 1-based index of the Dirichlet eigenvalue.
    pub j: usize,
    pub family: Family,
}

/// Both candidate families built from the Laplacian eigenvalues
/// `lambdas` (ascending) and the ratio `a / n`, sorted by value.
pub fn candidates(lambdas: &[f64], a_over_n: f64) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::with_capacity(2 * lambdas.len());
    for (i, &l) in lambdas.iter().enumerate() {
        out.push(Candidate {
            value: libm::sqrt(l),
            j: i + 1,
            family: Family::Laplacian,
        });
        out.push(Candidate {
            value: libm::sqrt(l * a_over_n),
            j: i + 1,
            family: Family::Weighted,
        });
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    out
}

/// The candidate nearest to an observed limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identification {
    pub nearest: Candidate,
    pub distance: f64,
    /// Distance from the nearest to the runner-up candidate.
    pub gap: f64,
    /// `distance >= gap / 2`: the observation does not single out one
    /// candidate.
    pub ambiguous: bool,
}

/// Nearest candidate to `k`, or `None` for an empty list.
pub fn identify(k: f64, cands: &[Candidate]) -> Option<Identification> {
    let mut order: Vec<&Candidate> = cands.iter().collect();
    order.sort_by(|x, y| libm::fabs(x.value - k).total_cmp(&libm::fabs(y.value - k)));
    let nearest = **order.first()?;
    let distance = libm::fabs(nearest.value - k);
    let gap = order.get(1).map_or(f64::INFINITY, |c| libm::fabs(c.value - nearest.value));
    Some(Identification {
        nearest,
        distance,
        gap,
        ambiguous: distance >= 0.5 * gap,
    })
}

/// Ordering of a sequence of first eigenvalues along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Ascending,
    Descending,
    Violated,
}

impl Monotonicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Ascending => "ascending",
            Monotonicity::Descending => "descending",
            Monotonicity::Violated => "violated",
        }
    }
}

/// Strict ordering of `values`; sequences of length below 2 are ascending.
pub fn monotonicity(values: &[f64]) -> Monotonicity {
    if values.windows(2).all(|w| w[0] < w[1]) {
        Monotonicity::Ascending
    } else if values.windows(2).all(|w| w[0] > w[1]) {
        Monotonicity::Descending
    } else {
        Monotonicity::Violated
    }
}
