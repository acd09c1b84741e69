use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure mode of the solvers. Messages name the module and the
/// offending parameter so they can be surfaced verbatim by a driver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("params: invalid material parameter {name} = {value}")]
    InvalidParams { name: &'static str, value: f64 },

    #[error("params: regime is Neither ({0}); the solver needs CaseI or CaseII")]
    Regime(String),

    #[error("specialfn: {what} = {value} outside the working range")]
    Range { what: &'static str, value: f64 },

    #[error("disk: analytic backend requires A = a*I, got off-diagonal or unequal entries")]
    Shape,

    #[error("{solver}: no root in [{lo}, {hi}]")]
    NoRootInRange { solver: &'static str, lo: f64, hi: f64 },

    #[error("disk: d_{m}(k) vanishes identically on the scan grid (degenerate medium)")]
    DegenerateMedium { m: u32 },

    #[error("config: {0}")]
    Config(String),

    #[error("mesh: parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("mesh: validation failed: {0}")]
    Validation(String),

    #[error("eig: factorization failed, nonpositive pivot {pivot} at row {row}{}", at_k(.k))]
    Factorization { row: usize, pivot: f64, k: Option<f64> },

    #[error("eig: no convergence after {iterations} iterations (best Rayleigh quotient {best}, residual {residual})")]
    NoConvergence { iterations: usize, best: f64, residual: f64 },

    #[error("tev_fem: f({k}) = {value} is not positive at the left end of the search range")]
    NotPositiveAtStart { k: f64, value: f64 },
}

fn at_k(k: &Option<f64>) -> String {
    match k {
        Some(k) => alloc::format!(" (k = {k})"),
        None => String::new(),
    }
}

impl Error {
    /// Attach the trial wavenumber to a factorization failure.
    pub fn at_wavenumber(self, k: f64) -> Self {
        match self {
            Error::Factorization { row, pivot, .. } => Error::Factorization { row, pivot, k: Some(k) },
            other => other,
        }
    }
}
