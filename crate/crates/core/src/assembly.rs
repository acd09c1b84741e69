//! P1 finite element matrices for the bilinear forms of the auxiliary
//! problem, with exact element integration for constant coefficients.

use alloc::vec::Vec;

use crate::mesh::Mesh;
use crate::params::{classify_with_override, MaterialParams, Regime};
use crate::sparse::{Csr, SparseSym};
use crate::{Error, Result};

/// Global matrices on the full node set plus the interior restriction.
#[derive(Debug, Clone)]
pub struct FormSet {
    /// `∫ ∇φ_i·∇φ_j`
    pub s: SparseSym,
    /// `∫ ∇φ_i·A∇φ_j`
    pub s_a: SparseSym,
    /// `∫ φ_i φ_j`
    pub m: SparseSym,
    /// `∫ n φ_i φ_j`
    pub m_n: SparseSym,
    /// `∫_∂D η φ_i φ_j`
    pub b_eta: SparseSym,
    interior: Vec<usize>,
    slot: Vec<Option<usize>>,
    params: MaterialParams,
    regime: Regime,
}

/// Assemble all forms; the regime is classified without the `η = 0`
/// override.
pub fn assemble(mesh: &Mesh, params: &MaterialParams) -> FormSet {
    assemble_with_override(mesh, params, false)
}

/// Assemble all forms; `allow_zero_eta` lets `η = 0` classify by `A` and
/// `n` alone (limit studies).
pub fn assemble_with_override(mesh: &Mesh, params: &MaterialParams, allow_zero_eta: bool) -> FormSet {
    let nv = mesh.num_vertices();
    let a = params.a_matrix();
    let n = params.n();
    let eta = params.eta();
    let verts = mesh.vertices();
    let nt = mesh.triangles().len();
    let mut s = Vec::with_capacity(6 * nt);
    let mut s_a = Vec::with_capacity(6 * nt);
    let mut m = Vec::with_capacity(6 * nt);
    for tri in mesh.triangles() {
        let p = [verts[tri[0]], verts[tri[1]], verts[tri[2]]];
        let two_signed = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let area = 0.5 * two_signed.abs();
        let grads: [[f64; 2]; 3] = core::array::from_fn(|i| {
            let (q1, q2) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            [(q1[1] - q2[1]) / two_signed, (q2[0] - q1[0]) / two_signed]
        });
        for i in 0..3 {
            for j in i..3 {
                let (gi, gj) = (grads[i], grads[j]);
                let plain = area * (gi[0] * gj[0] + gi[1] * gj[1]);
                let aniso = area * a.bilinear(gi, gj);
                let mass = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                s.push((tri[i], tri[j], plain));
                s_a.push((tri[i], tri[j], aniso));
                m.push((tri[i], tri[j], mass));
            }
        }
    }
    let mut b = Vec::with_capacity(3 * mesh.boundary_edges().len());
    for &[u, v] in mesh.boundary_edges() {
        let (pu, pv) = (verts[u], verts[v]);
        let len = libm::hypot(pv[0] - pu[0], pv[1] - pu[1]);
        let c = eta * len / 6.0;
        b.push((u, u, 2.0 * c));
        b.push((v, v, 2.0 * c));
        b.push((u, v, c));
    }
    let m_n: Vec<_> = m.iter().map(|&(i, j, v)| (i, j, n * v)).collect();
    let interior = mesh.interior_nodes().to_vec();
    let mut slot = alloc::vec![None; nv];
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = Some(k);
    }
    FormSet {
        s: SparseSym::from_triplets(nv, s),
        s_a: SparseSym::from_triplets(nv, s_a),
        m: SparseSym::from_triplets(nv, m),
        m_n: SparseSym::from_triplets(nv, m_n),
        b_eta: SparseSym::from_triplets(nv, b),
        interior,
        slot,
        params: *params,
        regime: classify_with_override(params, allow_zero_eta),
    }
}

impl FormSet {
    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn num_nodes(&self) -> usize {
        self.s.dim()
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    /// Full-node index of each interior slot (the columns of `E`).
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    /// `E u`: extend an interior vector by zero.
    pub fn extend(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.interior.len());
        let mut full = alloc::vec![0.0; self.num_nodes()];
        for (&v, &x) in self.interior.iter().zip(u) {
            full[v] = x;
        }
        full
    }

    /// `E^T v`: select interior entries of a full vector.
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.num_nodes());
        self.interior.iter().map(|&i| v[i]).collect()
    }

    /// The restriction map `E` as a full-by-interior matrix.
    pub fn e_matrix(&self) -> Csr {
        let trip = self.interior.iter().enumerate().map(|(c, &r)| (r, c, 1.0)).collect();
        Csr::from_triplets(self.num_nodes(), self.num_interior(), trip)
    }

    /// Interior-interior block `E^T K E`.
    pub fn interior_block(&self, k: &SparseSym) -> SparseSym {
        k.restrict(&self.interior, |i| self.slot[i])
    }

    /// `G_k = (S - S_A) + k^2 (M_n - M) + B_eta` on the full node set.
    pub fn aux_matrix(&self, k: f64) -> Result<SparseSym> {
        self.require_regime()?;
        let k2 = k * k;
        Ok(SparseSym::linear_combination(&[
            (1.0, &self.s),
            (-1.0, &self.s_a),
            (k2, &self.m_n),
            (-k2, &self.m),
            (1.0, &self.b_eta),
        ]))
    }

    /// `S_A - k^2 M_n` on the full node set; `C_k` is its product with `E`.
    pub fn rhs_full(&self, k: f64) -> SparseSym {
        SparseSym::linear_combination(&[(1.0, &self.s_a), (-k * k, &self.m_n)])
    }

    /// `C_k = (S_A - k^2 M_n) E`, full-by-interior.
    pub fn rhs_matrix(&self, k: f64) -> Csr {
        let full = self.rhs_full(k);
        let mut trip = Vec::with_capacity(2 * full.nnz());
        for (r, c, v) in full.entries() {
            if let Some(sc) = self.slot[c] {
                trip.push((r, sc, v));
            }
            if r != c {
                if let Some(sr) = self.slot[r] {
                    trip.push((c, sr, v));
                }
            }
        }
        Csr::from_triplets(self.num_nodes(), self.num_interior(), trip)
    }

    /// Regime sign `σ`, or a regime error when the parameters are in
    /// neither case.
    pub fn require_regime(&self) -> Result<f64> {
        self.regime.sigma().map_err(|_| {
            Error::Regime(alloc::format!(
                "assembly: G_k needs case I or case II, parameters classify as {}",
                self.regime
            ))
        })
    }
}
