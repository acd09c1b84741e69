use proptest::prelude::*;
use tev_core::specialfn::{bessel_eval, bessel_j, bessel_j_prime};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn three_term_recurrence(m in 1u32..40, x in 0.05f64..200.0) {
        let lhs = bessel_j(m - 1, x).unwrap() + bessel_j(m + 1, x).unwrap();
        let rhs = 2.0 * m as f64 / x * bessel_j(m, x).unwrap();
        let scale = bessel_j(m - 1, x).unwrap().abs().max(bessel_j(m + 1, x).unwrap().abs()).max(1e-300);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(rhs.abs()).max(1e-12), "m={} x={} {} vs {}", m, x, lhs, rhs);
    }

    #[test]
    fn derivative_matches_central_difference(m in 0u32..30, x in 0.5f64..100.0) {
        let d = bessel_j_prime(m, x).unwrap();
        let fd = |h: f64| (bessel_j(m, x + h).unwrap() - bessel_j(m, x - h).unwrap()) / (2.0 * h);
        let (e4, e5) = ((fd(1e-4) - d).abs(), (fd(1e-5) - d).abs());
        prop_assert!(e4 <= 1e-7, "m={} x={} err={}", m, x, e4);
        prop_assert!(e5 <= 1e-8, "m={} x={} err={}", m, x, e5);
    }

    #[test]
    fn values_are_bounded(m in 0u32..=50, x in 0.0f64..1000.0) {
        let e = bessel_eval(m, x).unwrap();
        prop_assert!(e.value.abs() <= 1.0);
        prop_assert!(e.value.is_finite() && e.derivative.is_finite());
    }

    #[test]
    fn derivative_identity(m in 1u32..40, x in 0.1f64..300.0) {
        let d = bessel_j_prime(m, x).unwrap();
        let id = 0.5 * (bessel_j(m - 1, x).unwrap() - bessel_j(m + 1, x).unwrap());
        prop_assert!((d - id).abs() <= 1e-12 * id.abs().max(1e-3));
    }
}

#[test]
fn order_zero_derivative_is_minus_j1() {
    for i in 0..200 {
        let x = 0.37 * i as f64;
        assert_eq!(bessel_j_prime(0, x).unwrap(), -bessel_j(1, x).unwrap());
    }
}
