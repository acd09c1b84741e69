//! Real interior transmission eigenvalues for anisotropic scatterers with a
//! conductive boundary condition.
//!
//! Two backends locate eigenvalues `k`:
//!
//! * [`disk`] finds roots of the separated Bessel determinant `d_m(k)` on the
//!   unit disk;
//! * [`tev_fem`] discretizes the auxiliary problem `u -> v_u` with P1 finite
//!   elements on any triangulated domain and bisects on sign changes of the
//!   smallest eigenvalue of the quadratic form `(L_k u, u)`.
//!
//! The crate is `no_std` and only needs an allocator. File IO, the command
//! line driver and table emission live in the companion `tev` crate.
#![no_std]

extern crate alloc;

pub mod assembly;
pub mod disk;
pub mod eig;
mod error;
pub mod limits;
pub mod mesh;
pub mod params;
pub mod sparse;
pub mod specialfn;
pub mod tev_fem;

pub use error::{Error, Result};
pub use params::{DomainKind, DomainSpec, MaterialParams, Regime, SymMat2};

/// Which solver produced a [`TevResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Root of the disk determinant for mode `m`.
    Analytic { m: u32 },
    /// Sign change of the discrete `f(k)` on a finite element mesh.
    Fem,
}

/// How a root was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Bracketed by a sign change and refined by bisection.
    SignChange,
    /// `|f|` dipped below the near-root tolerance without changing sign.
    /// Candidate for an eigenvalue of even multiplicity.
    NearRoot,
}

/// A located transmission eigenvalue together with solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TevResult {
    pub k: f64,
    pub backend: Backend,
    pub bracket: (f64, f64),
    /// `|d_m(k)|` for the analytic backend, `|f(k)|` for FEM.
    pub residual: f64,
    /// Grid step (analytic) or mesh refinement level (FEM).
    pub meta: TevMeta,
    pub kind: RootKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TevMeta {
    GridStep(f64),
    Refinement(u32),
}
