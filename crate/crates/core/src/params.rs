//! Material coefficients, regime classification and the domain catalog.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Constant symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2::scalar(1.0);

    pub const fn scalar(a: f64) -> Self {
        SymMat2 { xx: a, xy: 0.0, yy: a }
    }

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let r = libm::hypot(half_diff, self.xy);
        (mean - r, mean + r)
    }

    /// `Some(a)` when the matrix is exactly `a * I`.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.xy == 0.0 && self.xx == self.yy).then_some(self.xx)
    }

    /// `x^T M y`.
    #[inline]
    pub fn bilinear(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        x[0] * (self.xx * y[0] + self.xy * y[1]) + x[1] * (self.xy * y[0] + self.yy * y[1])
    }
}

/// The coefficient triple `(A, n, eta)`; all constant on the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    a_matrix: SymMat2,
    n: f64,
    eta: f64,
}

impl MaterialParams {
    pub fn new(a_matrix: SymMat2, n: f64, eta: f64) -> Result<Self> {
        let (lo, _) = a_matrix.eigenvalues();
        if !(lo > 0.0) || !a_matrix.xx.is_finite() || !a_matrix.yy.is_finite() || !a_matrix.xy.is_finite() {
            return Err(Error::InvalidParams { name: "A_min", value: lo });
        }
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParams { name: "n", value: n });
        }
        if !eta.is_finite() {
            return Err(Error::InvalidParams { name: "eta", value: eta });
        }
        Ok(MaterialParams { a_matrix, n, eta })
    }

    /// `A = a I`.
    pub fn isotropic(a: f64, n: f64, eta: f64) -> Result<Self> {
        Self::new(SymMat2::scalar(a), n, eta)
    }

    pub fn a_matrix(&self) -> SymMat2 {
        self.a_matrix
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn a_min(&self) -> f64 {
        self.a_matrix.eigenvalues().0
    }

    pub fn a_max(&self) -> f64 {
        self.a_matrix.eigenvalues().1
    }

    // Constant coefficients: min and max coincide.
    pub fn n_min(&self) -> f64 {
        self.n
    }

    pub fn n_max(&self) -> f64 {
        self.n
    }

    pub fn eta_min(&self) -> f64 {
        self.eta
    }

    pub fn eta_max(&self) -> f64 {
        self.eta
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.a_matrix, self.n, eta)
    }

    pub fn with_n(&self, n: f64) -> Result<Self> {
        Self::new(self.a_matrix, n, self.eta)
    }

    pub fn with_a(&self, a_matrix: SymMat2) -> Result<Self> {
        Self::new(a_matrix, self.n, self.eta)
    }

    pub fn regime(&self) -> Regime {
        classify(self)
    }
}

/// Which sign pattern of the existence theory the coefficients satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `A_min > 1`, `n_max < 1`, `eta_max < 0`.
    CaseI,
    /// `A_max < 1`, `n_min > 1`, `eta_min > 0`.
    CaseII,
    Neither,
}

impl Regime {
    /// Sign that turns `L_k` into a positive operator for small `k`:
    /// `-1` in CaseI, `+1` in CaseII.
    pub fn sigma(self) -> Result<f64> {
        match self {
            Regime::CaseI => Ok(-1.0),
            Regime::CaseII => Ok(1.0),
            Regime::Neither => Err(Error::Regime("no sign available".to_string())),
        }
    }

    /// Lower bound on every real eigenvalue given the first Dirichlet
    /// eigenvalue `lambda1` of `-Laplace` on the domain.
    pub fn faber_krahn_bound(self, params: &MaterialParams, lambda1: f64) -> Result<f64> {
        match self {
            Regime::CaseI => Ok(libm::sqrt(lambda1)),
            Regime::CaseII => Ok(libm::sqrt(params.a_min() * lambda1 / params.n_max())),
            Regime::Neither => Err(Error::Regime(format!("no Faber-Krahn bound for {}", describe(params)))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::CaseI => "CaseI",
            Regime::CaseII => "CaseII",
            Regime::Neither => "Neither",
        })
    }
}

/// Strict-inequality classification. Boundary cases (`A_min = 1`,
/// `eta = 0`, ...) are `Neither`.
pub fn classify(params: &MaterialParams) -> Regime {
    let (a_min, a_max) = params.a_matrix.eigenvalues();
    if a_min - 1.0 > 0.0 && params.n_max() - 1.0 < 0.0 && params.eta_max() < 0.0 {
        Regime::CaseI
    } else if a_max - 1.0 < 0.0 && params.n_min() - 1.0 > 0.0 && params.eta_min() > 0.0 {
        Regime::CaseII
    } else {
        Regime::Neither
    }
}

/// Classification for `eta = 0` limit studies: when `allow_zero_eta` is set
/// and `eta == 0`, only the `A` and `n` inequalities are tested.
pub fn classify_with_override(params: &MaterialParams, allow_zero_eta: bool) -> Regime {
    if !(allow_zero_eta && params.eta == 0.0) {
        return classify(params);
    }
    let (a_min, a_max) = params.a_matrix.eigenvalues();
    if a_min > 1.0 && params.n < 1.0 {
        Regime::CaseI
    } else if a_max < 1.0 && params.n > 1.0 {
        Regime::CaseII
    } else {
        Regime::Neither
    }
}

/// Faber-Krahn lower bound for the regime of `params`.
pub fn faber_krahn_bracket(params: &MaterialParams, lambda1: f64) -> Result<f64> {
    classify(params).faber_krahn_bound(params, lambda1)
}

fn describe(params: &MaterialParams) -> String {
    format!(
        "A_min={} A_max={} n={} eta={}",
        params.a_min(),
        params.a_max(),
        params.n,
        params.eta
    )
}

/// The catalog of domains, or an externally supplied triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainKind {
    /// Unit disk centred at the origin.
    UnitDisk,
    /// `(-1/2, 1/2)^2`.
    UnitSquare,
    /// `(-1/2, 1/2)^2` minus `[0, 1/2]^2`.
    LShape,
    ExternalMesh(String),
}

impl DomainKind {
    /// Exact area of the continuous domain, if known.
    pub fn area(&self) -> Option<f64> {
        match self {
            DomainKind::UnitDisk => Some(core::f64::consts::PI),
            DomainKind::UnitSquare => Some(1.0),
            DomainKind::LShape => Some(0.75),
            DomainKind::ExternalMesh(_) => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            DomainKind::UnitDisk => "disk",
            DomainKind::UnitSquare => "square",
            DomainKind::LShape => "lshape",
            DomainKind::ExternalMesh(path) => path,
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::ExternalMesh(path) => write!(f, "mesh:{path}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disk" | "unit-disk" | "unitdisk" | "circle" => Ok(DomainKind::UnitDisk),
            "square" | "unit-square" | "unitsquare" => Ok(DomainKind::UnitSquare),
            "lshape" | "l-shape" | "l" => Ok(DomainKind::LShape),
            _ => match s.trim().strip_prefix("mesh:") {
                Some(path) if !path.is_empty() => Ok(DomainKind::ExternalMesh(path.to_string())),
                _ => Err(Error::Config(format!("unknown domain kind {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub refinement: u32,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, refinement: u32) -> Self {
        DomainSpec { kind, refinement }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(a: f64, n: f64, eta: f64) -> MaterialParams {
        MaterialParams::isotropic(a, n, eta).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&iso(3.0, 0.7, -2.0)), Regime::CaseI);
        assert_eq!(classify(&iso(0.4, 3.0, 2.0)), Regime::CaseII);
        assert_eq!(classify(&iso(1.0, 1.0, 0.0)), Regime::Neither);
        // boundary values are not guessed
        assert_eq!(classify(&iso(1.0, 0.5, -1.0)), Regime::Neither);
        assert_eq!(classify(&iso(0.5, 1.0, 1.0)), Regime::Neither);
        assert_eq!(classify(&iso(0.5, 2.0, 0.0)), Regime::Neither);
        // mixed sign patterns
        assert_eq!(classify(&iso(3.0, 0.7, 1.0)), Regime::Neither);
        assert_eq!(classify(&iso(0.4, 3.0, -1.0)), Regime::Neither);
    }

    #[test]
    fn zero_eta_override() {
        let p = iso(0.4, 3.0, 0.0);
        assert_eq!(classify(&p), Regime::Neither);
        assert_eq!(classify_with_override(&p, false), Regime::Neither);
        assert_eq!(classify_with_override(&p, true), Regime::CaseII);
        assert_eq!(classify_with_override(&iso(3.0, 0.7, 0.0), true), Regime::CaseI);
        // override only affects eta == 0
        assert_eq!(classify_with_override(&iso(3.0, 0.7, 1.0), true), Regime::Neither);
    }

    #[test]
    fn full_matrix_with_same_range_classifies_alike() {
        // eigenvalues 1.5 and 3.5
        let rot = SymMat2::new(2.5, 1.0, 2.5);
        let (lo, hi) = rot.eigenvalues();
        assert!((lo - 1.5).abs() < 1e-14 && (hi - 3.5).abs() < 1e-14);
        let p = MaterialParams::new(rot, 0.7, -1.0).unwrap();
        assert_eq!(classify(&p), Regime::CaseI);
        let q = MaterialParams::new(SymMat2::new(0.5, 0.2, 0.5), 3.0, 1.0).unwrap();
        assert_eq!(classify(&q), Regime::CaseII);
        // straddling 1 is Neither
        let r = MaterialParams::new(SymMat2::new(1.0, 0.5, 1.0), 0.7, -1.0).unwrap();
        assert_eq!(classify(&r), Regime::Neither);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(MaterialParams::isotropic(-1.0, 1.0, 0.0).is_err());
        assert!(MaterialParams::isotropic(1.0, 0.0, 0.0).is_err());
        assert!(MaterialParams::isotropic(1.0, 1.0, f64::NAN).is_err());
        assert!(MaterialParams::new(SymMat2::new(1.0, 2.0, 1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn faber_krahn_examples() {
        let j01: f64 = 2.404825557695773;
        let lambda1 = j01 * j01;
        let b = faber_krahn_bracket(&iso(0.4, 3.0, 2.0), lambda1).unwrap();
        assert!((b - 0.8781).abs() < 5e-5, "{b}");
        let b = faber_krahn_bracket(&iso(3.0, 0.7, -1.0), lambda1).unwrap();
        assert!((b - 2.4048).abs() < 5e-5);
        assert!(matches!(faber_krahn_bracket(&iso(1.0, 1.0, 0.0), lambda1), Err(Error::Regime(_))));
        // continuity as A -> I and n -> 1 within CaseII
        let eps = 1e-9;
        let b = faber_krahn_bracket(&iso(1.0 - eps, 1.0 + eps, 1.0), lambda1).unwrap();
        assert!((b - j01).abs() < 1e-8);
    }

    #[test]
    fn case_two_bound_below_case_one_bound() {
        let lambda1 = 19.739;
        for &(a, n) in &[(0.4, 3.0), (0.9, 1.1), (0.2, 5.0)] {
            let p = iso(a, n, 1.0);
            let b2 = Regime::CaseII.faber_krahn_bound(&p, lambda1).unwrap();
            let b1 = Regime::CaseI.faber_krahn_bound(&p, lambda1).unwrap();
            assert!(b2 <= b1);
        }
    }

    #[test]
    fn domain_kind_parsing() {
        assert_eq!("disk".parse::<DomainKind>().unwrap(), DomainKind::UnitDisk);
        assert_eq!("L-Shape".parse::<DomainKind>().unwrap(), DomainKind::LShape);
        assert_eq!(
            "mesh:foo.mesh".parse::<DomainKind>().unwrap(),
            DomainKind::ExternalMesh("foo.mesh".into())
        );
        assert!(matches!("triangle".parse::<DomainKind>(), Err(Error::Config(_))));
    }
}
