use proptest::prelude::*;
use tev_core::assembly::{assemble, FormSet};
use tev_core::mesh::generate;
use tev_core::sparse::{dot, norm};
use tev_core::tev_fem::{FemOptions, FemSolver, Weight};
use tev_core::{DomainKind, DomainSpec, MaterialParams};

fn domain() -> impl Strategy<Value = DomainKind> {
    prop_oneof![Just(DomainKind::UnitSquare), Just(DomainKind::LShape), Just(DomainKind::UnitDisk)]
}

fn regime_params() -> impl Strategy<Value = MaterialParams> {
    prop_oneof![
        (1.5f64..4.0, 0.3f64..0.8, -4.0f64..-0.5).prop_map(|(a, n, e)| MaterialParams::isotropic(a, n, e).unwrap()),
        (0.3f64..0.7, 1.5f64..4.0, 0.5f64..4.0).prop_map(|(a, n, e)| MaterialParams::isotropic(a, n, e).unwrap()),
    ]
}

fn forms(kind: DomainKind, r: u32, p: &MaterialParams) -> (FormSet, f64, f64) {
    let mesh = generate(&DomainSpec::new(kind, r)).unwrap();
    let (area, perimeter) = (mesh.area(), mesh.perimeter());
    (assemble(&mesh, p), area, perimeter)
}

fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

fn vector(len: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..len)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn form_set_invariants(kind in domain(), r in 0u32..3, p in regime_params()) {
        let (f, area, perimeter) = forms(kind, r, &p);
        let one = ones(f.num_nodes());
        let mut y = vec![0.0; one.len()];
        f.s.matvec(&one, &mut y);
        prop_assert!(norm(&y) <= 1e-10 * (1 << r) as f64);
        f.s_a.matvec(&one, &mut y);
        prop_assert!(norm(&y) <= 1e-9 * (1 << r) as f64);
        prop_assert!((f.m.bilinear(&one, &one) - area).abs() <= 1e-10);
        prop_assert!((f.m_n.bilinear(&one, &one) - p.n() * area).abs() <= 1e-9);
        prop_assert!((f.b_eta.bilinear(&one, &one) - p.eta() * perimeter).abs() <= 1e-9 * p.eta().abs().max(1.0));
        for m in [&f.s, &f.s_a, &f.m, &f.m_n, &f.b_eta] {
            prop_assert!(m.entries().all(|(i, j, v)| m.get(j, i) == v));
        }
    }

    #[test]
    fn quadratic_form_symmetry(p in regime_params(), k in 0.0f64..4.0, seed in 0u64..1000) {
        let mesh = generate(&DomainSpec::new(DomainKind::UnitDisk, 1)).unwrap();
        let solver = FemSolver::from_mesh(&mesh, &p, false, FemOptions::default()).unwrap();
        let op = match solver.lk_operator(k) {
            Ok(op) => op,
            // outside the certified range of the auxiliary problem
            Err(_) => return Ok(()),
        };
        let d = solver.forms().num_interior();
        let (u, w) = (vector(d, seed), vector(d, seed + 7919));
        let (qu, qw) = (op.apply_q(&u), op.apply_q(&w));
        prop_assert!((dot(&qu, &w) - dot(&u, &qw)).abs() <= 1e-9 * norm(&u) * norm(&w) * (1.0 + norm(&qu) / norm(&u)));
    }

    #[test]
    fn positive_below_faber_krahn(p in regime_params(), frac in 0.05f64..0.95) {
        let mesh = generate(&DomainSpec::new(DomainKind::UnitSquare, 1)).unwrap();
        let solver = FemSolver::from_mesh(&mesh, &p, false, FemOptions::default()).unwrap();
        let k = frac * solver.faber_krahn().unwrap();
        let f = solver.f_of_k(k, None).unwrap();
        prop_assert!(f.f > 0.0, "f({}) = {}", k, f.f);
    }
}

#[test]
fn sign_changes_do_not_depend_on_weight() {
    for (kind, a, n, eta, k_hi) in [
        (DomainKind::UnitSquare, 0.5, 2.0, 2.0, 12.0),
        (DomainKind::LShape, 3.0, 0.5, -2.0, 16.0),
    ] {
        let p = MaterialParams::isotropic(a, n, eta).unwrap();
        let mesh = generate(&DomainSpec::new(kind.clone(), 2)).unwrap();
        let mut roots = Vec::new();
        for w in [Weight::Mass, Weight::H1] {
            let opts = FemOptions {
                weight: w,
                ..FemOptions::default()
            };
            let s = FemSolver::from_mesh(&mesh, &p, false, opts).unwrap();
            roots.push(s.find_first_tev(None, k_hi).unwrap().k);
        }
        assert!((roots[0] - roots[1]).abs() <= 1e-5, "{kind}: {roots:?}");
    }
}

#[test]
fn returned_roots_respect_faber_krahn() {
    let p = MaterialParams::isotropic(0.5, 2.0, 1.0).unwrap();
    let mesh = generate(&DomainSpec::new(DomainKind::LShape, 1)).unwrap();
    let s = FemSolver::from_mesh(&mesh, &p, false, FemOptions::default()).unwrap();
    let bound = s.faber_krahn().unwrap();
    let roots = s.find_tevs_in_range(None, 14.0, 20).unwrap();
    assert!(!roots.is_empty());
    assert!(roots.iter().all(|r| r.k >= bound));
    assert!(roots.windows(2).all(|w| w[0].k < w[1].k));
}
