//! Sparse symmetric linear algebra: SPD factorization and smallest
//! eigenpairs of symmetric pencils.

mod cholesky;
pub mod dense;
mod lobpcg;
mod ordering;

use alloc::vec::Vec;

pub use cholesky::{SpdFactor, Symbolic};
pub use lobpcg::{lobpcg, smallest_eig, smallest_eigs, EigOptions, EigOutcome, EigResult, SymOperator};

use crate::assembly::FormSet;
use crate::sparse::SparseSym;
use crate::Result;

/// Factor an SPD matrix with a fill-reducing ordering.
pub fn factor_spd(k: &SparseSym) -> Result<SpdFactor> {
    SpdFactor::new(k)
}

/// The `count` smallest Dirichlet eigenvalues, ascending: of
/// `(S_II, M_II)` when `weighted` is false, of `(S_A,II, M_n,II)` otherwise.
pub fn dirichlet_eigs(forms: &FormSet, weighted: bool, count: usize) -> Result<Vec<f64>> {
    let (k, m) = if weighted { (&forms.s_a, &forms.m_n) } else { (&forms.s, &forms.m) };
    let k_ii = forms.interior_block(k);
    let m_ii = forms.interior_block(m);
    let t = factor_spd(&k_ii)?;
    let opts = EigOptions {
        tol: 1e-10,
        max_iter: 1000,
        guard: 2,
    };
    let res = smallest_eigs(&k_ii, &m_ii, Some(&t), count, &opts, &[])?;
    Ok(res.into_iter().map(|r| r.value).collect())
}
