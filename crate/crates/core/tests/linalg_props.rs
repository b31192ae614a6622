mod common;

use hus_core::linalg::{
    classify, expm_closed, expm_series_oracle, expm_with_class, integrated_expm,
    spectral_projections, EigenClass, Mat2, DEFAULT_TOL,
};
use proptest::prelude::*;

use common::{eigenvalues, m};

fn small_matrix() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(-1.0f64..1.0).prop_map(|[a, b, c, d]| m(a, b, c, d))
}

fn rel(x: &Mat2, y: &Mat2) -> f64 {
    x.max_abs_diff(y) / y.max_abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn closed_form_matches_series(a in small_matrix(), t in -5.0f64..5.0) {
        prop_assert!(rel(&expm_closed(&a, t), &expm_series_oracle(&a, t)) < 1e-9);
    }

    #[test]
    fn semigroup(a in small_matrix(), s in -2.5f64..2.5, t in -2.5f64..2.5) {
        let lhs = expm_closed(&a, s + t);
        let rhs = expm_closed(&a, s) * expm_closed(&a, t);
        prop_assert!(rel(&rhs, &lhs) < 1e-8);
    }

    #[test]
    fn determinant_identity(a in small_matrix(), t in -5.0f64..5.0) {
        let det = expm_closed(&a, t).det();
        let want = (t * a.trace()).exp();
        prop_assert!((det - want).abs() <= 1e-8 * want.max(1.0));
    }

    #[test]
    fn classification_matches_vieta(entries in prop::array::uniform4(-3.0f64..3.0)) {
        let [a, b, c, d] = entries;
        let x = m(a, b, c, d);
        let scale = x.max_abs().max(1.0);
        match classify(&x, DEFAULT_TOL) {
            EigenClass::RealDistinct { lambda1, lambda2 } => {
                prop_assert!(lambda1 > lambda2);
                prop_assert!((lambda1 + lambda2 - x.trace()).abs() <= 1e-12 * scale);
                prop_assert!((lambda1 * lambda2 - x.det()).abs() <= 1e-11 * scale * scale);
            }
            EigenClass::RealRepeated { lambda, eta } => {
                prop_assert_eq!(lambda, 0.5 * x.trace());
                prop_assert_eq!(eta, lambda - a);
            }
            EigenClass::ComplexPair { alpha, beta } => {
                prop_assert!(beta > 0.0);
                let [z, _] = eigenvalues(&x);
                prop_assert!((alpha - z.re).abs() <= 1e-12 * scale);
                prop_assert!((beta - z.im.abs()).abs() <= 1e-7 * scale);
            }
        }
    }

    #[test]
    fn projections_split_identity(l1 in 0.1f64..3.0, gap in 0.2f64..3.0, p in -0.7f64..0.7, q in -0.7f64..0.7) {
        let a = common::with_distinct(l1, l1 - gap, p, q);
        let ec = classify(&a, DEFAULT_TOL);
        let pp = spectral_projections(&a, &ec).unwrap();
        let tol = 1e-10 * pp.first.max_abs().max(1.0);
        prop_assert!((pp.first + pp.second).max_abs_diff(&Mat2::IDENTITY) < tol);
        prop_assert!((pp.first * pp.first).max_abs_diff(&pp.first) < tol);
        prop_assert!((pp.first * pp.second).max_abs() < tol);
        let t = 0.7;
        let EigenClass::RealDistinct { lambda1, lambda2 } = ec else { unreachable!() };
        let spectral = (lambda1 * t).exp() * pp.first + (lambda2 * t).exp() * pp.second;
        prop_assert!(rel(&spectral, &expm_series_oracle(&a, t)) < 1e-9);
    }

    #[test]
    fn integrated_expm_derivative(a in small_matrix(), t in -3.0f64..3.0) {
        // d/dt ∫₀ᵗ e^{sA} ds = e^{tA}.
        let ec = classify(&a, DEFAULT_TOL);
        let h = 1e-4;
        let d = (1.0 / (2.0 * h)) * (integrated_expm(&a, &ec, t + h) - integrated_expm(&a, &ec, t - h));
        prop_assert!(rel(&d, &expm_with_class(&a, &ec, t)) < 1e-6);
    }
}

#[test]
fn structured_exponentials() {
    let rot = m(0.0, 1.0, -1.0, 0.0);
    let t = std::f64::consts::FRAC_PI_2;
    assert!(expm_closed(&rot, t).max_abs_diff(&m(0.0, 1.0, -1.0, 0.0)) < 1e-15);
    let jordan = m(1.0, 1.0, 0.0, 1.0);
    let e = std::f64::consts::E;
    assert!(expm_closed(&jordan, 1.0).max_abs_diff(&m(e, e, 0.0, e)) < 1e-14);
    assert_eq!(expm_closed(&Mat2::ZERO, 3.0), Mat2::IDENTITY);
}
