//! Structural facts of the interacting sector: vanishing and linear scaling of
//! Λ, reduction to the free equation, and the inequality and non-additivity
//! of the nonlinear right-hand side on a stored instance.

use fermivar::dirac::h_momentum;
use fermivar::grassmann::{gaussian_element, GrassmannElement};
use fermivar::interaction::{
    compare_rhs, density_and_phase, free_rhs, lambda_functional, linear_quartic_rhs, nonlinear_rhs, InteractionSpec,
};
use fermivar::linalg::{c, CMatrix};
use fermivar::random;
use proptest::prelude::*;

fn spec(coupling: f64) -> InteractionSpec {
    InteractionSpec { coupling, spinor_dim: 2, lambda: 2.0, h: h_momentum(&[0.3], 1.0).unwrap() }
}

/// The stored instance: two Gaussians on one two-component site.
fn golden() -> (GrassmannElement, GrassmannElement) {
    let omega1 = CMatrix::from_row_slice(2, 2, &[c(0.2, 0.1), c(0.3, 0.5), c(0.0, -0.1), c(-0.4, 0.7)]);
    let omega2 = CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.1, 0.2), c(0.25, 0.0), c(0.1, -0.3)]);
    (gaussian_element(&omega1).unwrap(), gaussian_element(&omega2).unwrap())
}

#[test]
fn lambda_vanishes_without_coupling() {
    let (psi, _) = golden();
    let (rho, s) = density_and_phase(&psi).unwrap();
    assert!(lambda_functional(&rho, &s, &spec(0.0)).unwrap().is_zero());
}

#[test]
fn both_equations_reduce_to_the_free_one() {
    let (psi, _) = golden();
    let free = free_rhs(&psi, &spec(0.0)).unwrap();
    assert_eq!(nonlinear_rhs(&psi, &spec(0.0)).unwrap().max_abs_diff(&free), 0.0);
    assert_eq!(linear_quartic_rhs(&psi, &spec(0.0)).unwrap().max_abs_diff(&free), 0.0);
}

#[test]
fn equations_differ_on_the_golden_instance() {
    let (psi, _) = golden();
    let report = compare_rhs(&psi, &spec(0.1), &[0.05, 0.1, 0.2]).unwrap();
    for p in &report.points {
        println!("G={} diff={:.15e} lambda={:.15e}", p.coupling, p.difference_norm, p.lambda_norm);
        assert!(p.difference_norm > 1e-6);
        assert!(p.lambda_norm > 1e-3);
    }
    let ratio = report.points[2].difference_norm / report.points[1].difference_norm;
    assert!((ratio - 2.0).abs() < 1e-8, "{ratio}");
    assert!((report.scaling_exponent.unwrap() - 1.0).abs() < 1e-8);
    let stored = 1.960707790569519e-1;
    assert!((report.points[1].difference_norm - stored).abs() < 1e-12 * stored);
}

#[test]
fn nonlinear_rhs_is_not_additive() {
    let (psi1, psi2) = golden();
    let spec = spec(0.1);
    let sum = &psi1 + &psi2;
    let split = &nonlinear_rhs(&psi1, &spec).unwrap() + &nonlinear_rhs(&psi2, &spec).unwrap();
    let defect = nonlinear_rhs(&sum, &spec).unwrap().max_abs_diff(&split);
    println!("non-additivity {defect:.15e}");
    assert!(defect > 1e-6, "{defect}");
    let stored = 1.888583132933261e-2;
    assert!((defect - stored).abs() < 1e-12 * stored, "{defect}");
    let linear = &linear_quartic_rhs(&psi1, &spec).unwrap() + &linear_quartic_rhs(&psi2, &spec).unwrap();
    assert!(linear_quartic_rhs(&sum, &spec).unwrap().max_abs_diff(&linear) < 1e-15);
}

#[test]
fn lambda_is_real_for_real_inputs() {
    let mut rng = random::rng(21);
    let real = |e: GrassmannElement| e.map_coefficients(|z| c(z.re, 0.0));
    let rho = &GrassmannElement::one(2) + &real(random::even_element(&mut rng, 2)).soul();
    let s = real(random::even_element(&mut rng, 2));
    let lambda = lambda_functional(&rho, &s, &spec(0.3)).unwrap();
    assert!(lambda.terms().all(|(_, z)| z.im == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lambda_is_linear_in_the_coupling(seed in 0u64..1000, g in 0.01f64..1.0) {
        let mut rng = random::rng(seed);
        let rho = &GrassmannElement::one(2) + &random::even_element(&mut rng, 2).soul();
        let s = random::even_element(&mut rng, 2);
        let one = lambda_functional(&rho, &s, &spec(g)).unwrap();
        let two = lambda_functional(&rho, &s, &spec(2.0 * g)).unwrap();
        let scale = one.coefficient_norm().max(1e-300);
        prop_assert!(two.max_abs_diff(&one.scale(c(2.0, 0.0))) <= 1e-12 * scale);
    }
}
