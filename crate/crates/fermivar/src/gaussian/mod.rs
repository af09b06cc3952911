//! Gaussian functional states `N exp(u† Ω u)` and their time evolution.
//!
//! The covariance obeys a matrix Riccati equation. It is integrated through
//! the linear propagation `i Q̇ = h Q` with `Q(t₀) = P₋`, after which
//! `Ω = (λ/2)(Q − P₊)(Q + P₊)⁻¹` with the projector `P₊` of the initial
//! Hamiltonian.

mod fluctuation;
mod fock_rep;

pub use fluctuation::{
    fluctuation_closed_form, fluctuation_expectation, tsallis_ratio, FluctuationReport, TsallisReport,
    MAX_ORACLE_MODES, MAX_TSALLIS_MODES,
};
pub use fock_rep::{build_fock, site_annihilator, site_creator, FockChecks, FockRep, MAX_FOCK_DIM};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac::{eigenmodes, ModeBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Tikhonov shift used when `Q + P₊` is badly conditioned.
pub const TIKHONOV_SHIFT: f64 = 1e-12;
/// Condition number above which a covariance is flagged as regularized.
pub const CONDITION_FLAG: f64 = 1e10;
/// Condition number beyond which regularization is refused.
pub const CONDITION_LIMIT: f64 = 1e14;
/// Relative tolerance for the hermiticity of the propagating Hamiltonian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Rejects non-positive or non-finite `λ`.
pub fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "lambda", reason: format!("must be positive and finite, got {lambda}") })
    }
}

/// `κ = λ² / (1 + λ²/4)²`, equal to 1 at `λ = 2`.
pub fn kappa(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let q = 1.0 + lambda * lambda / 4.0;
    Ok(lambda * lambda / (q * q))
}

/// A Gaussian covariance `Ω` together with the representation parameter `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    #[serde(with = "crate::linalg::serde_matrix")]
    pub omega: CMatrix,
    pub lambda: f64,
    /// Condition number of `Q + P₊` used to build `omega` (1 for closed forms).
    pub condition: f64,
    /// Whether the inverse had to be regularized.
    pub regularized: bool,
}

impl Covariance {
    /// Single-particle dimension.
    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }
}

/// The free vacuum `Ω₀ = (λ/2)(P₋ − P₊)`.
pub fn vacuum_covariance(basis: &ModeBasis, lambda: f64) -> Result<Covariance> {
    check_lambda(lambda)?;
    let omega = (&basis.p_minus - &basis.p_plus) * c(lambda / 2.0, 0.0);
    Ok(Covariance { omega, lambda, condition: 1.0, regularized: false })
}

/// Time-stepping scheme for `i Q̇ = h Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// `Q ← exp(−i h(t + dt/2) dt) Q`, exactly unitary.
    MatrixExpMidpoint,
    /// Classical fourth-order Runge-Kutta.
    Rk4,
}

/// One sample of `Tr(h R)` with `R = (Q − P₊)(Q + P₊)⁻¹ = 2Ω/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

/// The propagated `Q(t)` with the data needed for covariances and phases.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub q: CMatrix,
    pub t: f64,
    /// Mode basis of the Hamiltonian at the initial time.
    pub initial: ModeBasis,
    /// `Tr(h R)` at every grid time, used for the phase quadrature.
    pub history: Vec<TraceSample>,
    /// Largest condition number of `Q + P₊` seen while recording the history.
    pub worst_condition: f64,
}

fn checked_h(h_of_t: &dyn Fn(f64) -> CMatrix, t: f64, dim: usize) -> Result<CMatrix> {
    let h = h_of_t(t);
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: h.nrows() });
    }
    linalg::ensure_hermitian(&h, HERMITIAN_TOL)?;
    Ok(h)
}

/// `(M, cond, regularized)` ↦ an inverse of `M`, Tikhonov-shifted when badly conditioned.
fn regularized_inverse(m: &CMatrix) -> Result<(CMatrix, f64, bool)> {
    let condition = linalg::condition_number(m);
    if condition > CONDITION_LIMIT || !condition.is_finite() {
        return Err(Error::Singular { condition });
    }
    if condition <= CONDITION_FLAG {
        return Ok((linalg::inverse(m)?, condition, false));
    }
    let n = m.nrows();
    let mdag = m.adjoint();
    let shifted = &mdag * m + linalg::identity(n) * c(TIKHONOV_SHIFT, 0.0);
    Ok((linalg::inverse(&shifted)? * mdag, condition, true))
}

/// `R = (Q − P₊)(Q + P₊)⁻¹` with its conditioning data.
fn reduced_covariance(q: &CMatrix, p_plus: &CMatrix) -> Result<(CMatrix, f64, bool)> {
    let (inv, condition, regularized) = regularized_inverse(&(q + p_plus))?;
    Ok(((q - p_plus) * inv, condition, regularized))
}

impl EvolutionState {
    /// Starts at `Q(t₀) = P₋` of `h(t₀)`.
    pub fn start(h_of_t: &dyn Fn(f64) -> CMatrix, t0: f64) -> Result<Self> {
        let h0 = h_of_t(t0);
        let dim = h0.nrows();
        let h0 = checked_h(h_of_t, t0, dim)?;
        let initial = eigenmodes(&h0)?;
        let q = initial.p_minus.clone();
        let mut state = Self { q, t: t0, initial, history: Vec::new(), worst_condition: 1.0 };
        state.record(&h0)?;
        Ok(state)
    }

    fn record(&mut self, h: &CMatrix) -> Result<()> {
        let (r, condition, _) = reduced_covariance(&self.q, &self.initial.p_plus)?;
        self.worst_condition = self.worst_condition.max(condition);
        let tr = (h * r).trace();
        self.history.push(TraceSample { t: self.t, re: tr.re, im: tr.im });
        Ok(())
    }

    /// Single-particle dimension.
    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Advances to `t1` in `steps` equal steps.
    pub fn advance(
        &mut self,
        h_of_t: &dyn Fn(f64) -> CMatrix,
        t1: f64,
        steps: usize,
        integrator: Integrator,
    ) -> Result<()> {
        if t1.partial_cmp(&self.t) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter {
                name: "t1",
                reason: format!("must exceed the current time {}", self.t),
            });
        }
        if steps == 0 {
            return Err(Error::InvalidParameter { name: "steps", reason: "must be at least 1".into() });
        }
        let dim = self.dim();
        let t0 = self.t;
        let dt = (t1 - t0) / steps as f64;
        let minus_i = c(0.0, -1.0);
        for k in 0..steps {
            let t = t0 + k as f64 * dt;
            match integrator {
                Integrator::MatrixExpMidpoint => {
                    let h = checked_h(h_of_t, t + 0.5 * dt, dim)?;
                    self.q = linalg::expm_hermitian(&h, dt) * &self.q;
                }
                Integrator::Rk4 => {
                    let h0 = checked_h(h_of_t, t, dim)?;
                    let hm = checked_h(h_of_t, t + 0.5 * dt, dim)?;
                    let h1 = checked_h(h_of_t, t + dt, dim)?;
                    let half = c(0.5 * dt, 0.0);
                    let full = c(dt, 0.0);
                    let k1 = &h0 * &self.q * minus_i;
                    let k2 = &hm * (&self.q + &k1 * half) * minus_i;
                    let k3 = &hm * (&self.q + &k2 * half) * minus_i;
                    let k4 = &h1 * (&self.q + &k3 * full) * minus_i;
                    self.q += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
                }
            }
            self.t = if k + 1 == steps { t1 } else { t + dt };
            let h = checked_h(h_of_t, self.t, dim)?;
            self.record(&h)?;
        }
        Ok(())
    }

    /// `‖Q†Q − P₋‖_F`, zero for exact unitary propagation.
    pub fn isometry_defect(&self) -> f64 {
        linalg::frobenius(&(self.q.adjoint() * &self.q - &self.initial.p_minus))
    }

    /// `∫ Tr(h R) ds` over the recorded history by the trapezoidal rule.
    pub fn trace_integral(&self) -> Result<Complex64> {
        if self.history.is_empty() {
            return Err(Error::InvalidParameter { name: "history", reason: "no samples recorded".into() });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for w in self.history.windows(2) {
            let dt = w[1].t - w[0].t;
            sum += c(w[0].re + w[1].re, w[0].im + w[1].im) * (0.5 * dt);
        }
        Ok(sum)
    }
}

/// Propagates `i Q̇ = h(t) Q` from `Q(t₀) = P₋` to `t₁`.
pub fn evolve_q(
    h_of_t: &dyn Fn(f64) -> CMatrix,
    t0: f64,
    t1: f64,
    steps: usize,
    integrator: Integrator,
) -> Result<EvolutionState> {
    let mut state = EvolutionState::start(h_of_t, t0)?;
    state.advance(h_of_t, t1, steps, integrator)?;
    Ok(state)
}

/// `Ω(t) = (λ/2)(Q − P₊)(Q + P₊)⁻¹`.
pub fn omega_from_q(state: &EvolutionState, lambda: f64) -> Result<Covariance> {
    check_lambda(lambda)?;
    let (r, condition, regularized) = reduced_covariance(&state.q, &state.initial.p_plus)?;
    Ok(Covariance { omega: r * c(lambda / 2.0, 0.0), lambda, condition, regularized })
}

/// Right-hand side of `i Ω̇ = (λ/4)(1 − 2Ω/λ) h (1 + 2Ω/λ)`.
pub fn covariance_rhs(omega: &CMatrix, h: &CMatrix, lambda: f64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let n = omega.nrows();
    let id = linalg::identity(n);
    let s = c(2.0 / lambda, 0.0);
    Ok((&id - omega * s) * h * (&id + omega * s) * c(lambda / 4.0, 0.0))
}

/// `det(1 + Ω†Ω)^{-1/2}`: the modulus of the normalization factor.
pub fn normalization_modulus(omega: &CMatrix) -> f64 {
    let n = omega.nrows();
    let d = linalg::det(&(linalg::identity(n) + omega.adjoint() * omega));
    d.re.powf(-0.5)
}

/// `N(t) = det(1 + Ω†Ω)^{-1/2} exp(−(i/λ) ∫ Re Tr(hΩ) ds)`.
pub fn normalization_factor(state: &EvolutionState, lambda: f64) -> Result<Complex64> {
    let cov = omega_from_q(state, lambda)?;
    let modulus = normalization_modulus(&cov.omega);
    // Tr(hΩ)/λ = Tr(hR)/2 with R = 2Ω/λ.
    let integral = state.trace_integral()?;
    Ok(Complex64::from_polar(modulus, -0.5 * integral.re))
}

/// Result of an overlap evaluation, before and after clipping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    /// Clipped value in `[0, 1]`.
    pub value: f64,
    /// Real part of the unclipped determinant ratio.
    pub raw: f64,
    /// Imaginary part of the unclipped ratio.
    pub imaginary: f64,
    /// Whether the raw value left `[−ε, 1 + ε]` or had a visible imaginary part.
    pub violation: bool,
}

/// Slack allowed outside `[0, 1]` before an overlap is reported as a violation.
pub const OVERLAP_SLACK: f64 = 1e-9;

/// `|⟨Ψ₁|Ψ₂⟩|² / (⟨Ψ₁|Ψ₁⟩⟨Ψ₂|Ψ₂⟩)` for `Ψᵢ = exp(u† Ωᵢ u)`.
pub fn overlap_report(omega1: &CMatrix, omega2: &CMatrix) -> Result<Overlap> {
    let n = omega1.nrows();
    if omega2.nrows() != n || omega1.ncols() != n || omega2.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: omega2.nrows() });
    }
    let id = linalg::identity(n);
    let a12 = &id + omega1.adjoint() * omega2;
    let a21 = &id + omega2.adjoint() * omega1;
    let n1 = &id + omega1.adjoint() * omega1;
    let n2 = &id + omega2.adjoint() * omega2;
    let ratio = linalg::det(&(a12 * a21)) / linalg::det(&(n1 * n2));
    let violation = ratio.re < -OVERLAP_SLACK
        || ratio.re > 1.0 + OVERLAP_SLACK
        || ratio.im.abs() > OVERLAP_SLACK * ratio.re.abs().max(1.0);
    Ok(Overlap { value: ratio.re.clamp(0.0, 1.0), raw: ratio.re, imaginary: ratio.im, violation })
}

/// Clipped overlap probability; see [`overlap_report`].
pub fn overlap_sq(omega1: &CMatrix, omega2: &CMatrix) -> Result<f64> {
    Ok(overlap_report(omega1, omega2)?.value)
}

fn check_contraction(beta: &CMatrix) -> Result<()> {
    let norm = linalg::spectral_norm(beta);
    if norm >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("spectral norm {norm} must be below 1 for an asymptotic extraction"),
        });
    }
    Ok(())
}

/// No-pair probability `det(1 + κ β†(1 − ββ†)⁻¹β)⁻¹`.
pub fn creation_probability(beta: &CMatrix, lambda: f64) -> Result<f64> {
    let k = kappa(lambda)?;
    check_contraction(beta)?;
    let rows = beta.nrows();
    let cols = beta.ncols();
    let inner = linalg::inverse(&(linalg::identity(rows) - beta * beta.adjoint()))?;
    let m = linalg::identity(cols) + beta.adjoint() * inner * beta * c(k, 0.0);
    Ok(1.0 / linalg::det(&m).re)
}

/// `det(1 − β†β)`, the `κ = 1` form of [`creation_probability`].
pub fn creation_probability_unit_kappa(beta: &CMatrix) -> Result<f64> {
    check_contraction(beta)?;
    let cols = beta.ncols();
    Ok(linalg::det(&(linalg::identity(cols) - beta.adjoint() * beta)).re)
}

/// Bogoliubov blocks of an evolved state against an out basis.
///
/// With `V₋` the initial negative-energy modes and `W±` the out modes,
/// `α = W₋† U V₋` and `β = W₊† U V₋`; `U V₋ = Q V₋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovData {
    #[serde(with = "crate::linalg::serde_matrix")]
    pub alpha: CMatrix,
    #[serde(with = "crate::linalg::serde_matrix")]
    pub beta: CMatrix,
}

impl BogoliubovData {
    /// `‖α†α + β†β − 1‖_F`.
    pub fn normal_defect(&self) -> f64 {
        let n = self.alpha.ncols();
        linalg::frobenius(
            &(self.alpha.adjoint() * &self.alpha + self.beta.adjoint() * &self.beta - linalg::identity(n)),
        )
    }

    /// Mean eigenvalue of `β†β`, the pair-creation probability per mode.
    pub fn mean_beta_sq(&self) -> f64 {
        let n = self.beta.ncols();
        if n == 0 {
            return 0.0;
        }
        (self.beta.adjoint() * &self.beta).trace().re / n as f64
    }

    /// `X = β α⁻¹`, mapping negative-energy to positive-energy out amplitudes.
    pub fn pair_amplitude(&self) -> Result<CMatrix> {
        Ok(&self.beta * linalg::inverse(&self.alpha)?)
    }

    /// `B = W₊ X W₋†`, strictly off-diagonal with respect to the out splitting.
    ///
    /// The overlap of `Ω₀ᵒᵘᵗ` with `Ω₀ᵒᵘᵗ + λB` equals [`creation_probability`].
    pub fn pair_operator(&self, out: &ModeBasis) -> Result<CMatrix> {
        let x = self.pair_amplitude()?;
        Ok(out.positive_vectors() * x * out.negative_vectors().adjoint())
    }
}

/// Extracts `α` and `β` of an evolved state relative to `out`.
pub fn bogoliubov(state: &EvolutionState, out: &ModeBasis) -> Result<BogoliubovData> {
    if out.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: out.dim() });
    }
    let evolved = &state.q * state.initial.negative_vectors();
    Ok(BogoliubovData {
        alpha: out.negative_vectors().adjoint() * &evolved,
        beta: out.positive_vectors().adjoint() * evolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::momentum_modes;

    #[test]
    fn kappa_is_one_at_two() {
        assert_eq!(kappa(2.0).unwrap(), 1.0);
        assert!(kappa(0.0).is_err());
        assert!(kappa(-1.0).is_err());
    }

    #[test]
    fn vacuum_has_expected_diagonal() {
        let basis = momentum_modes(&[0.0, 0.0, 0.0], 1.0).unwrap();
        let cov = vacuum_covariance(&basis, 2.0).unwrap();
        let in_modes = basis.vectors.adjoint() * &cov.omega * &basis.vectors;
        for (k, expected) in [-1.0, -1.0, 1.0, 1.0].iter().enumerate() {
            assert!((in_modes[(k, k)] - c(*expected, 0.0)).norm() < 1e-14);
        }
        let sq = &cov.omega * &cov.omega - linalg::identity(4);
        assert!(linalg::frobenius(&sq) < 1e-13);
        assert!(linalg::hermiticity_defect(&cov.omega) < 1e-14);
        assert!(vacuum_covariance(&basis, 0.0).is_err());
    }

    #[test]
    fn vacuum_normalization_modulus() {
        let basis = momentum_modes(&[0.3, -0.2, 0.5], 1.0).unwrap();
        let cov = vacuum_covariance(&basis, 2.0).unwrap();
        assert!((normalization_modulus(&cov.omega) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn scalar_creation_probability() {
        let beta = CMatrix::from_element(1, 1, c((-std::f64::consts::PI / 2.0).exp(), 0.0));
        let p = creation_probability(&beta, 2.0).unwrap();
        assert!((p - (1.0 - (-std::f64::consts::PI).exp())).abs() < 1e-14);
        assert!((creation_probability_unit_kappa(&beta).unwrap() - p).abs() < 1e-14);
        assert_eq!(creation_probability(&CMatrix::zeros(2, 2), 1.3).unwrap(), 1.0);
        assert!(creation_probability(&CMatrix::from_element(1, 1, c(1.0, 0.0)), 2.0).is_err());
    }

    #[test]
    fn zero_hamiltonian_keeps_q() {
        let zero = |_t: f64| CMatrix::zeros(2, 2);
        // A zero Hamiltonian puts both modes in P₋.
        let state = evolve_q(&zero, 0.0, 1.0, 5, Integrator::MatrixExpMidpoint).unwrap();
        assert!(linalg::max_abs_diff(&state.q, &linalg::identity(2)) < 1e-15);
        assert_eq!(state.trace_integral().unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn argument_guards() {
        let zero = |_t: f64| CMatrix::zeros(2, 2);
        assert!(evolve_q(&zero, 1.0, 0.0, 5, Integrator::Rk4).is_err());
        assert!(evolve_q(&zero, 0.0, 1.0, 0, Integrator::Rk4).is_err());
        let bad = |_t: f64| CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(evolve_q(&bad, 0.0, 1.0, 2, Integrator::Rk4), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn overlap_trivial_cases() {
        let o = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.1), c(0.0, 0.2), c(-0.1, 0.0), c(0.5, 0.0)]);
        let r = overlap_report(&o, &o).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14 && !r.violation);
        assert!(overlap_sq(&o, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn covariance_serializes_row_major() {
        let cov = Covariance {
            omega: CMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(3.0, 4.0)]),
            lambda: 2.0,
            condition: 1.0,
            regularized: false,
        };
        let json = serde_json::to_string(&cov).unwrap();
        assert!(json.contains(r#""data":[[1.0,2.0],[3.0,4.0]]"#), "{json}");
        let back: Covariance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cov);
    }
}
