//! Covariance propagation through randomized pulses, Gaussian overlaps against
//! Berezin inner products, and the creation probability at `λ = 2`.

use fermivar::dirac::eigenmodes;
use fermivar::gaussian::{
    bogoliubov, covariance_rhs, creation_probability, omega_from_q, overlap_report, EvolutionState,
};
use fermivar::grassmann::{gaussian_element, inner_product};
use fermivar::linalg::{self, c, identity, CMatrix};
use fermivar::random;
use rand::Rng;

use super::selftest::leibniz_det;
use super::{Output, Worst};
use crate::config::EvolveParams;
use crate::record::Bound;
use crate::table::Table;

/// A Hermitian matrix with half its spectrum near `−1` and half near `+1`.
fn gapped_hamiltonian(rng: &mut impl Rng, d: usize) -> CMatrix {
    let u = random::unitary(rng, d);
    let mut diag = CMatrix::zeros(d, d);
    for k in 0..d {
        let sign = if k < d / 2 { -1.0 } else { 1.0 };
        diag[(k, k)] = c(sign * (1.0 + 0.3 * rng.random::<f64>()), 0.0);
    }
    &u * diag * u.adjoint()
}

fn advance_to(
    state: &mut EvolutionState,
    h: &dyn Fn(f64) -> CMatrix,
    t: f64,
    dt: f64,
    p: &EvolveParams,
) -> fermivar::Result<()> {
    let steps = ((t - state.t) / dt).ceil().max(1.0) as usize;
    state.advance(h, t, steps, p.integrator)
}

fn riccati(p: &EvolveParams, rng: &mut impl Rng, out: &mut Output) -> fermivar::Result<()> {
    let mut residuals = Table::new("riccati", &["run", "t", "residual"]);
    let mut runs = Table::new("evolve_runs", &["run", "isometry_defect", "mean_beta_sq", "normal_defect"]);
    let (mut residual, mut isometry) = (Worst::default(), Worst::default());
    let dt = p.t_final / p.steps as f64;
    let eps = p.fd_step;
    for run in 0..p.runs {
        let h0 = gapped_hamiltonian(rng, p.dim);
        let v = random::hermitian(rng, p.dim) * c(p.pulse_strength, 0.0);
        let (center, width) = (p.pulse_center, p.pulse_width);
        let h = move |t: f64| &h0 + &v * c((-((t - center) / width).powi(2)).exp(), 0.0);
        let mut state = EvolutionState::start(&h, 0.0)?;
        for &t in &p.probe_times {
            advance_to(&mut state, &h, t - eps, dt, p)?;
            let before = omega_from_q(&state, p.lambda)?.omega;
            advance_to(&mut state, &h, t, dt, p)?;
            let omega = omega_from_q(&state, p.lambda)?.omega;
            advance_to(&mut state, &h, t + eps, dt, p)?;
            let after = omega_from_q(&state, p.lambda)?.omega;
            let derivative = (after - before) * c(0.0, 0.5 / eps);
            let r = linalg::max_abs_diff(&derivative, &covariance_rhs(&omega, &h(t), p.lambda)?);
            residual.add(r);
            residuals.push(vec![run.into(), t.into(), r.into()]);
        }
        if state.t < p.t_final {
            advance_to(&mut state, &h, p.t_final, dt, p)?;
        }
        let defect = state.isometry_defect();
        isometry.add(defect);
        let data = bogoliubov(&state, &eigenmodes(&h(p.t_final))?)?;
        runs.push(vec![run.into(), defect.into(), data.mean_beta_sq().into(), data.normal_defect().into()]);
    }
    out.recorder.check(
        "riccati_residual",
        "largest |i dΩ/dt − (λ/4)(1 − 2Ω/λ)h(1 + 2Ω/λ)| with Ω from Q and dΩ/dt by central difference",
        residual.max,
        "absolute",
        Bound::AtMost { limit: p.residual_tolerance },
    );
    out.recorder.check(
        "isometry",
        "largest ‖Q†Q − P₋‖_F at the final time",
        isometry.max,
        "absolute",
        Bound::AtMost { limit: p.isometry_tolerance },
    );
    out.table(residuals);
    out.table(runs);
    Ok(())
}

fn overlaps(p: &EvolveParams, rng: &mut impl Rng, out: &mut Output) -> fermivar::Result<()> {
    let mut table = Table::new("overlap", &["pair", "modes", "raw", "oracle", "error"]);
    let mut worst = Worst::default();
    let mut violations = 0usize;
    for pair in 0..p.overlap_pairs {
        let d = 1 + pair % p.overlap_max_modes;
        let o1 = random::matrix(rng, d, d);
        let o2 = random::matrix(rng, d, d);
        let (p1, p2) = (gaussian_element(&o1)?, gaussian_element(&o2)?);
        let oracle = inner_product(&p1, &p2)?.norm_sqr() / (inner_product(&p1, &p1)?.re * inner_product(&p2, &p2)?.re);
        let r = overlap_report(&o1, &o2)?;
        violations += usize::from(r.violation);
        let error = (r.raw - oracle).abs();
        worst.add(error);
        table.push(vec![pair.into(), d.into(), r.raw.into(), oracle.into(), error.into()]);
    }
    out.recorder.check(
        "overlap",
        "largest |determinant overlap − normalized Berezin |⟨Ψ₁|Ψ₂⟩|²|",
        worst.max,
        "absolute",
        Bound::AtMost { limit: p.overlap_tolerance },
    );
    out.recorder.check(
        "overlap_violations",
        "overlaps outside [0, 1] or with a visible imaginary part",
        violations as f64,
        "count",
        Bound::AtMost { limit: 0.0 },
    );
    out.table(table);
    Ok(())
}

fn creation(p: &EvolveParams, rng: &mut impl Rng, out: &mut Output) -> fermivar::Result<()> {
    let mut table = Table::new("kappa", &["case", "rows", "cols", "beta_norm", "probability", "oracle", "error"]);
    let mut worst = Worst::default();
    let m = p.kappa_max_modes;
    for case in 0..p.kappa_cases {
        let rows = 1 + case % m;
        let cols = 1 + (case / m) % m;
        let raw = random::matrix(rng, rows, cols);
        let target = p.kappa_beta_norm * rng.random_range(0.05..1.0);
        let beta = &raw * c(target / linalg::spectral_norm(&raw), 0.0);
        let probability = creation_probability(&beta, 2.0)?;
        let oracle = leibniz_det(&(identity(cols) - beta.adjoint() * &beta)).re;
        let error = (probability - oracle).abs();
        worst.add(error);
        table.push(vec![
            case.into(),
            rows.into(),
            cols.into(),
            linalg::spectral_norm(&beta).into(),
            probability.into(),
            oracle.into(),
            error.into(),
        ]);
    }
    out.recorder.check(
        "kappa_consistency",
        "largest |no-pair probability at λ = 2 − det(1 − β†β)|",
        worst.max,
        "absolute",
        Bound::AtMost { limit: p.kappa_tolerance },
    );
    out.table(table);
    Ok(())
}

pub fn run(p: &EvolveParams, seed: u64, out: &mut Output) -> fermivar::Result<()> {
    let mut rng = random::rng(seed);
    riccati(p, &mut rng, out)?;
    overlaps(p, &mut rng, out)?;
    creation(p, &mut rng, out)
}
