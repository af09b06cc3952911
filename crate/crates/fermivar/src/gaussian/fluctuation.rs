//! Moments of the fluctuation distribution and the Tsallis information metric.
//!
//! Fluctuations `ω` over a time step `Δt` are distributed with amplitude
//! `√p = exp(Δt ω† h ω)`. Their second moment follows from the Gaussian
//! dual in closed form and is reproduced here by explicit Berezin integration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grassmann::{
    berezin_integrate_modes, expectation, gaussian_element, inverse_even, taylor_shift, GeneratorIndex,
    GrassmannElement, Monomial,
};
use crate::linalg::{self, c, CMatrix};

/// Largest number of fluctuation modes for the Berezin cross-check.
pub const MAX_ORACLE_MODES: usize = 3;
/// Largest number of density modes for the Tsallis expansion.
pub const MAX_TSALLIS_MODES: usize = 2;

/// `⟨ω_α ω†_β⟩` in closed form and, when small enough, by Berezin integration.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationReport {
    /// `−hΔt ((hΔt)² + 1)⁻¹`.
    pub closed_form: CMatrix,
    /// Element-wise Berezin expectations, present for `d ≤ 3`.
    pub oracle: Option<CMatrix>,
}

impl FluctuationReport {
    /// Largest element-wise deviation between the two evaluations.
    pub fn defect(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| linalg::max_abs_diff(o, &self.closed_form))
    }
}

fn check_step(h: &CMatrix, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("must be positive and finite, got {dt}") });
    }
    linalg::ensure_hermitian(h, 1e-12)
}

/// `−hΔt ((hΔt)² + 1)⁻¹` for Hermitian `h`.
pub fn fluctuation_closed_form(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    check_step(h, dt)?;
    let omega = h * c(dt, 0.0);
    let denom = &omega * &omega + linalg::identity(h.nrows());
    Ok(-(omega * linalg::inverse(&denom)?))
}

/// Second moments of the fluctuation amplitude `exp(Δt ω† h ω)`.
pub fn fluctuation_expectation(h: &CMatrix, dt: f64) -> Result<FluctuationReport> {
    let closed_form = fluctuation_closed_form(h, dt)?;
    let d = h.nrows();
    let oracle = if d <= MAX_ORACLE_MODES {
        let psi = gaussian_element(&(h * c(dt, 0.0)))?;
        let mut m = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let o = GrassmannElement::product_of(
                    d,
                    c(1.0, 0.0),
                    &[GeneratorIndex::field(a), GeneratorIndex::conjugate(b)],
                );
                m[(a, b)] = expectation(&psi, &o)?;
            }
        }
        Some(m)
    } else {
        None
    };
    Ok(FluctuationReport { closed_form, oracle })
}

/// Both information metrics for one time step and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsallisReport {
    /// `⟨(1/(α−1)) ∫(ρ^α ρ'^{1−α} − ρ)⟩_ω` to second order in `ω`.
    pub tsallis: Complex64,
    /// `⟨∫ ρ ln(ρ/ρ')⟩_ω` to second order in `ω`.
    pub kullback_leibler: Complex64,
    /// `tsallis / kullback_leibler`.
    pub ratio: f64,
}

fn fluctuation_window(n: usize) -> Monomial {
    let total = 2 * n;
    (n..total).map(|k| (1u64 << k) | (1u64 << (total + k))).fold(0, |a, b| a | b)
}

fn truncate_degree(x: &GrassmannElement, window: Monomial, max_degree: u32) -> GrassmannElement {
    GrassmannElement::from_terms(x.n_modes(), x.terms().filter(|(m, _)| (m & window).count_ones() <= max_degree))
}

/// Ratio of the Tsallis metric of order `α` to the Kullback-Leibler metric.
///
/// At second order the Tsallis integrand is continuous in `α` and coincides
/// with the Kullback-Leibler integrand at `α = 1`, so that order is accepted.
///
/// The density `ρ[ψ, ψ†]` is shifted by fluctuations `ω` living in an
/// enlarged algebra (modes `0..n` carry `ψ`, modes `n..2n` carry `ω`). With
/// `X = (ρ[ψ+ω] − ρ)ρ⁻¹` both divergences are expanded to second order in
/// `ω`, integrated over `ψ`, and averaged over `ω` with amplitude
/// `exp(Δt ω† h ω)`.
pub fn tsallis_ratio(rho: &GrassmannElement, alpha: f64, h: &CMatrix, dt: f64) -> Result<TsallisReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must be positive and finite, got {alpha}"),
        });
    }
    check_step(h, dt)?;
    let n = rho.n_modes();
    if n == 0 || n > MAX_TSALLIS_MODES {
        return Err(Error::Budget { what: "density modes", value: n, limit: MAX_TSALLIS_MODES });
    }
    if h.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.nrows() });
    }
    let total = 2 * n;
    let rho_big = rho.embed(0, total);
    let shifts: Vec<(GeneratorIndex, GrassmannElement)> = (0..n)
        .flat_map(|k| {
            [
                (GeneratorIndex::field(k), GrassmannElement::generator(total, GeneratorIndex::field(n + k))),
                (GeneratorIndex::conjugate(k), GrassmannElement::generator(total, GeneratorIndex::conjugate(n + k))),
            ]
        })
        .collect();
    let shifted = taylor_shift(&rho_big, &shifts)?;
    let inv = inverse_even(&rho_big)?;
    let window = fluctuation_window(n);
    let x = truncate_degree(&(&(&shifted - &rho_big) * &inv), window, 2);
    let x2 = truncate_degree(&(&x * &x), window, 2);

    // (1+X)^{1−α} − 1 = (1−α)X − ½α(1−α)X² + O(ω³), divided by α − 1.
    let tsallis_integrand = &rho_big * &(&x.scale(c(-1.0, 0.0)) + &x2.scale(c(alpha / 2.0, 0.0)));
    // −ln(1+X) = −X + ½X² + O(ω³).
    let kl_integrand = &rho_big * &(&x.scale(c(-1.0, 0.0)) + &x2.scale(c(0.5, 0.0)));

    let density_modes: Vec<usize> = (0..n).collect();
    let amplitude = gaussian_element(&(h * c(dt, 0.0)))?;
    let average = |integrand: &GrassmannElement| -> Result<Complex64> {
        let over_omega = berezin_integrate_modes(integrand, &density_modes).restrict(n, n)?;
        expectation(&amplitude, &over_omega)
    };
    let tsallis = average(&tsallis_integrand)?;
    let kullback_leibler = average(&kl_integrand)?;
    if kullback_leibler.norm() <= 1e-14 * rho.coefficient_norm().powi(2) {
        return Err(Error::ZeroNorm);
    }
    Ok(TsallisReport { tsallis, kullback_leibler, ratio: (tsallis / kullback_leibler).re })
}
