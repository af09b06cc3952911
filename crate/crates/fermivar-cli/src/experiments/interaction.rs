//! The nonlinear right-hand side against the linear quartic one.

use fermivar::grassmann::{gaussian_element, GrassmannElement};
use fermivar::interaction::{
    compare_rhs, density_and_phase, free_rhs, lambda_functional, linear_quartic_rhs, nonlinear_rhs,
};
use fermivar::linalg::{c, CMatrix};
use fermivar::random;

use super::Output;
use crate::config::{InteractionParams, InteractionState};
use crate::record::Bound;
use crate::table::Table;

/// The stored two-mode instance.
pub fn golden_covariances() -> (CMatrix, CMatrix) {
    let omega1 = CMatrix::from_row_slice(2, 2, &[c(0.2, 0.1), c(0.3, 0.5), c(0.0, -0.1), c(-0.4, 0.7)]);
    let omega2 = CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.1, 0.2), c(0.25, 0.0), c(0.1, -0.3)]);
    (omega1, omega2)
}

fn states(p: &InteractionParams, dim: usize, seed: u64) -> fermivar::Result<(GrassmannElement, GrassmannElement)> {
    let (o1, o2) = match p.state {
        InteractionState::Golden => golden_covariances(),
        InteractionState::Random => {
            let mut rng = random::rng(seed);
            (random::matrix(&mut rng, dim, dim), random::matrix(&mut rng, dim, dim))
        }
    };
    Ok((gaussian_element(&o1)?, gaussian_element(&o2)?))
}

pub fn run(p: &InteractionParams, seed: u64, out: &mut Output) -> fermivar::Result<()> {
    let spec = p.spec(p.coupling)?;
    let (psi, psi2) = states(p, spec.dim(), seed)?;
    let (rho, s) = density_and_phase(&psi)?;
    let r = &mut out.recorder;

    let free_spec = spec.with_coupling(0.0);
    r.check(
        "lambda_at_zero_coupling",
        "‖Λ‖ at G = 0",
        lambda_functional(&rho, &s, &free_spec)?.coefficient_norm(),
        "absolute",
        Bound::AtMost { limit: 0.0 },
    );
    let free = free_rhs(&psi, &free_spec)?;
    let reduction = nonlinear_rhs(&psi, &free_spec)?
        .max_abs_diff(&free)
        .max(linear_quartic_rhs(&psi, &free_spec)?.max_abs_diff(&free));
    r.check(
        "free_reduction",
        "both right-hand sides against Ĥ₀Ψ at G = 0",
        reduction,
        "absolute",
        Bound::AtMost { limit: 0.0 },
    );

    let one = lambda_functional(&rho, &s, &spec)?.coefficient_norm();
    let two = lambda_functional(&rho, &s, &spec.with_coupling(2.0 * p.coupling))?.coefficient_norm();
    r.info("lambda_norm", "‖Λ‖ at G", one, "absolute");
    r.check(
        "lambda_ratio",
        "|‖Λ(2G)‖ / ‖Λ(G)‖ − 2|",
        (two / one - 2.0).abs(),
        "absolute",
        Bound::AtMost { limit: p.ratio_tolerance },
    );

    let report = compare_rhs(&psi, &spec, &[p.coupling, 2.0 * p.coupling])?;
    let (d1, d2) = (report.points[0].difference_norm, report.points[1].difference_norm);
    r.check(
        "rhs_difference",
        "‖nonlinear − linear quartic‖ at G",
        d1,
        "absolute",
        Bound::Above { limit: p.difference_floor },
    );
    r.check(
        "difference_ratio",
        "|‖Δ(2G)‖ / ‖Δ(G)‖ − 2| for the difference Δ of the right-hand sides",
        (d2 / d1 - 2.0).abs(),
        "absolute",
        Bound::AtMost { limit: p.ratio_tolerance },
    );

    let sum = &psi + &psi2;
    let split = &nonlinear_rhs(&psi, &spec)? + &nonlinear_rhs(&psi2, &spec)?;
    let non_additive = nonlinear_rhs(&sum, &spec)?.max_abs_diff(&split);
    r.check(
        "nonlinear_non_additivity",
        "largest coefficient of RHS(Ψ₁+Ψ₂) − RHS(Ψ₁) − RHS(Ψ₂) for the nonlinear equation",
        non_additive,
        "absolute",
        Bound::Above { limit: p.difference_floor },
    );
    let linear = &linear_quartic_rhs(&psi, &spec)? + &linear_quartic_rhs(&psi2, &spec)?;
    r.check(
        "linear_additivity",
        "largest coefficient of RHS(Ψ₁+Ψ₂) − RHS(Ψ₁) − RHS(Ψ₂) for the linear quartic equation",
        linear_quartic_rhs(&sum, &spec)?.max_abs_diff(&linear),
        "absolute",
        Bound::AtMost { limit: p.additivity_tolerance },
    );

    let scan = compare_rhs(&psi, &spec, &p.scan)?;
    let mut table = Table::new("interaction", &["coupling", "difference_norm", "lambda_norm"]);
    for point in &scan.points {
        table.push(vec![point.coupling.into(), point.difference_norm.into(), point.lambda_norm.into()]);
    }
    if let Some(exponent) = scan.scaling_exponent {
        out.recorder.info(
            "scaling_exponent",
            "least-squares slope of ln‖Δ‖ against ln G over the scan",
            exponent,
            "dimensionless",
        );
    }
    out.table(table);
    Ok(())
}
