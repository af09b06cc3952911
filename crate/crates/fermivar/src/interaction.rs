//! Fermi self-interaction at finite modes.
//!
//! The contact coupling `G(ψ̄ψ)²` enters through the local kernel
//! `g = γ⁰√G` on the spinor block of every site. The Schrödinger equation of
//! the ensemble picks up the functional `Λ(ρ, S)Ψ`, which is compared with the
//! linear quartic term `−(16/λ²) Σ_x ((∂/∂ψ) g (∂/∂ψ†))²_x Ψ` obtained by
//! promoting the fields to derivatives.

use serde::{Deserialize, Serialize};

use crate::dirac::build_gamma;
use crate::error::{Error, Result};
use crate::gaussian::check_lambda;
use crate::grassmann::{derive, ln_even, GeneratorIndex, GrassmannElement};
use crate::linalg::{self, c, CMatrix};
use crate::Complex64;

/// Largest single-particle dimension handled by the interaction sector.
pub const MAX_INTERACTION_MODES: usize = 4;

/// Coupling, free kernel and representation of the interacting theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    /// Coupling `G ≥ 0`.
    pub coupling: f64,
    /// Spinor components per site: 1 for a scalar kernel, 2 or 4 for `γ⁰`.
    pub spinor_dim: usize,
    pub lambda: f64,
    /// Free single-particle Hamiltonian `h`.
    #[serde(with = "linalg::serde_matrix")]
    pub h: CMatrix,
}

impl InteractionSpec {
    /// Checks the coupling, `λ`, the kernel and the site structure.
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coupling",
                reason: format!("must be ≥ 0, got {}", self.coupling),
            });
        }
        check_lambda(self.lambda)?;
        if !matches!(self.spinor_dim, 1 | 2 | 4) {
            return Err(Error::InvalidParameter { name: "spinor_dim", reason: "must be 1, 2 or 4".into() });
        }
        let d = self.h.nrows();
        if self.h.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.h.ncols() });
        }
        if d == 0 || d % self.spinor_dim != 0 {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: "dimension must be a positive multiple of spinor_dim".into(),
            });
        }
        if d > MAX_INTERACTION_MODES {
            return Err(Error::Budget { what: "interaction modes", value: d, limit: MAX_INTERACTION_MODES });
        }
        linalg::ensure_hermitian(&self.h, 1e-12)
    }

    /// Single-particle dimension.
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.dim() / self.spinor_dim
    }

    /// The same spec with another coupling.
    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..self.clone() }
    }

    /// The site block `γ⁰√G` (or `√G` for a scalar kernel).
    pub fn g_block(&self) -> Result<CMatrix> {
        let root = self.coupling.sqrt();
        if self.spinor_dim == 1 {
            return Ok(CMatrix::from_element(1, 1, c(root, 0.0)));
        }
        Ok(build_gamma(self.spinor_dim)?.gamma0 * c(root, 0.0))
    }

    /// Full kernel `1_sites ⊗ γ⁰√G`.
    pub fn g_kernel(&self) -> Result<CMatrix> {
        Ok(linalg::kron(&linalg::identity(self.n_sites()), &self.g_block()?))
    }

    /// Non-zero entries `(x, y, g_xy)` of each site block, in global indices.
    fn site_entries(&self) -> Result<Vec<Vec<(usize, usize, Complex64)>>> {
        let block = self.g_block()?;
        let s = self.spinor_dim;
        Ok((0..self.n_sites())
            .map(|site| {
                let mut entries = Vec::new();
                for a in 0..s {
                    for b in 0..s {
                        if block[(a, b)] != c(0.0, 0.0) {
                            entries.push((site * s + a, site * s + b, block[(a, b)]));
                        }
                    }
                }
                entries
            })
            .collect())
    }
}

fn check_element(spec: &InteractionSpec, a: &GrassmannElement) -> Result<()> {
    if a.n_modes() != spec.dim() {
        return Err(Error::ModeMismatch { left: a.n_modes(), right: spec.dim() });
    }
    Ok(())
}

fn check_even(spec: &InteractionSpec, a: &GrassmannElement) -> Result<()> {
    check_element(spec, a)?;
    if !a.is_even() {
        return Err(Error::NotEven);
    }
    Ok(())
}

/// `Σ_{xy ∈ block} (∂A/∂ψ_x) g_xy (∂B/∂ψ†_y)`.
fn bracket(a: &GrassmannElement, b: &GrassmannElement, entries: &[(usize, usize, Complex64)]) -> GrassmannElement {
    let mut out = GrassmannElement::zero(a.n_modes());
    for &(x, y, g) in entries {
        let left = derive(a, GeneratorIndex::field(x));
        let right = derive(b, GeneratorIndex::conjugate(y));
        out = &out + &(&left * &right).scale(g);
    }
    out
}

/// `Σ_{xy ∈ block} g_xy ∂/∂ψ_x ∂/∂ψ†_y A`.
fn second_derivative(a: &GrassmannElement, entries: &[(usize, usize, Complex64)]) -> GrassmannElement {
    let mut out = GrassmannElement::zero(a.n_modes());
    for &(x, y, g) in entries {
        let inner = derive(a, GeneratorIndex::conjugate(y));
        out = &out + &derive(&inner, GeneratorIndex::field(x)).scale(g);
    }
    out
}

/// `Θ(S) = Σ_sites (∂S/∂ψ) g (∂S/∂ψ†)` with left derivatives.
pub fn theta(s: &GrassmannElement, spec: &InteractionSpec) -> Result<GrassmannElement> {
    spec.validate()?;
    check_even(spec, s)?;
    let mut out = GrassmannElement::zero(spec.dim());
    for entries in spec.site_entries()? {
        out = &out + &bracket(s, s, &entries);
    }
    Ok(out)
}

/// The functional `Λ(ρ, S)` of the interacting ensemble:
///
/// `(16/λ³) Σ_sites { [(∂ρ g ∂S) + (∂S g ∂ρ) + 2ρ (∂ g ∂ S)] Θ
///   + ρ [(∂Θ g ∂S) + (∂S g ∂Θ)] − Θ² }`,
/// with `Θ` the site density of [`theta`].
pub fn lambda_functional(
    rho: &GrassmannElement,
    s: &GrassmannElement,
    spec: &InteractionSpec,
) -> Result<GrassmannElement> {
    spec.validate()?;
    check_even(spec, rho)?;
    check_even(spec, s)?;
    if rho.body() == c(0.0, 0.0) {
        return Err(Error::ZeroBody);
    }
    let mut sum = GrassmannElement::zero(spec.dim());
    for entries in spec.site_entries()? {
        let th = bracket(s, s, &entries);
        let first = &(&bracket(rho, s, &entries) + &bracket(s, rho, &entries))
            + &(rho * &second_derivative(s, &entries)).scale(c(2.0, 0.0));
        let second = rho * &(&bracket(&th, s, &entries) + &bracket(s, &th, &entries));
        sum = &(&sum + &(&first * &th)) + &(&second - &(&th * &th));
    }
    Ok(sum.scale(c(16.0 / spec.lambda.powi(3), 0.0)))
}

/// `ρ = Ψ̄Ψ` and `S = (i/2)(ln Ψ̄ − ln Ψ)`, with `Ψ̄` the coefficient-wise conjugate.
pub fn density_and_phase(psi: &GrassmannElement) -> Result<(GrassmannElement, GrassmannElement)> {
    if !psi.is_even() {
        return Err(Error::NotEven);
    }
    if psi.body() == c(0.0, 0.0) {
        return Err(Error::ZeroBody);
    }
    let bar = psi.map_coefficients(|z| z.conj());
    let rho = &bar * psi;
    let s = (&ln_even(&bar)? - &ln_even(psi)?).scale(c(0.0, 0.5));
    Ok((rho, s))
}

/// `Ĥ₀Ψ = (4/λ) Σ_xy h_xy ∂/∂ψ_x ∂/∂ψ†_y Ψ`.
pub fn free_rhs(psi: &GrassmannElement, spec: &InteractionSpec) -> Result<GrassmannElement> {
    spec.validate()?;
    check_element(spec, psi)?;
    let d = spec.dim();
    let mut entries = Vec::new();
    for x in 0..d {
        for y in 0..d {
            if spec.h[(x, y)] != c(0.0, 0.0) {
                entries.push((x, y, spec.h[(x, y)]));
            }
        }
    }
    Ok(second_derivative(psi, &entries).scale(c(4.0 / spec.lambda, 0.0)))
}

/// `Ĥ₀Ψ + Λ(Ψ, Ψ̄)Ψ`.
pub fn nonlinear_rhs(psi: &GrassmannElement, spec: &InteractionSpec) -> Result<GrassmannElement> {
    let free = free_rhs(psi, spec)?;
    let (rho, s) = density_and_phase(psi)?;
    let lambda = lambda_functional(&rho, &s, spec)?;
    Ok(&free + &(&lambda * psi))
}

/// `Ĥ₀Ψ − (16/λ²) Σ_sites ((∂/∂ψ) g (∂/∂ψ†))² Ψ`.
pub fn linear_quartic_rhs(psi: &GrassmannElement, spec: &InteractionSpec) -> Result<GrassmannElement> {
    let free = free_rhs(psi, spec)?;
    let mut quartic = GrassmannElement::zero(spec.dim());
    for entries in spec.site_entries()? {
        quartic = &quartic + &second_derivative(&second_derivative(psi, &entries), &entries);
    }
    Ok(&free - &quartic.scale(c(16.0 / spec.lambda.powi(2), 0.0)))
}

/// Difference between the two right-hand sides at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub coupling: f64,
    /// `‖nonlinear − linear quartic‖` over the coefficients.
    pub difference_norm: f64,
    /// `‖Λ‖` over the coefficients.
    pub lambda_norm: f64,
}

/// Comparison of the two right-hand sides over a list of couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub points: Vec<ComparisonPoint>,
    /// Least-squares slope of `ln‖Δ‖` against `ln G` over the positive couplings.
    pub scaling_exponent: Option<f64>,
}

/// Evaluates both right-hand sides for every coupling.
pub fn compare_rhs(psi: &GrassmannElement, spec: &InteractionSpec, couplings: &[f64]) -> Result<ComparisonReport> {
    let (rho, s) = density_and_phase(psi)?;
    let mut points = Vec::new();
    for &g in couplings {
        let at = spec.with_coupling(g);
        let diff = &nonlinear_rhs(psi, &at)? - &linear_quartic_rhs(psi, &at)?;
        let lambda = lambda_functional(&rho, &s, &at)?;
        points.push(ComparisonPoint {
            coupling: g,
            difference_norm: diff.coefficient_norm(),
            lambda_norm: lambda.coefficient_norm(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.coupling > 0.0 && p.difference_norm > 0.0)
        .map(|p| (p.coupling.ln(), p.difference_norm.ln()))
        .collect();
    let scaling_exponent = (logs.len() >= 2).then(|| {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(ComparisonReport { points, scaling_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_spec(g: f64) -> InteractionSpec {
        InteractionSpec { coupling: g, spinor_dim: 1, lambda: 2.0, h: CMatrix::from_element(1, 1, c(1.0, 0.0)) }
    }

    fn pair(coefficient: f64) -> GrassmannElement {
        GrassmannElement::product_of(1, c(coefficient, 0.0), &[GeneratorIndex::conjugate(0), GeneratorIndex::field(0)])
    }

    #[test]
    fn theta_of_a_constant_vanishes() {
        let s = GrassmannElement::scalar(1, c(0.7, 0.0));
        assert!(theta(&s, &scalar_spec(0.3)).unwrap().is_zero());
    }

    #[test]
    fn theta_of_one_mode_pair() {
        // ∂(c u†u)/∂u = −c u†, ∂(c u†u)/∂u† = c u, so Θ = −c² g u†u.
        let g = 0.09f64;
        let cc = 1.5;
        let th = theta(&pair(cc), &scalar_spec(g)).unwrap();
        let expected = pair(-cc * cc * g.sqrt());
        assert!(th.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn theta_is_quadratic_in_the_phase() {
        let spec = scalar_spec(0.2);
        let s = &GrassmannElement::scalar(1, c(0.3, 0.0)) + &pair(0.8);
        let one = theta(&s, &spec).unwrap();
        let two = theta(&s.scale(c(2.0, 0.0)), &spec).unwrap();
        assert!(two.max_abs_diff(&one.scale(c(4.0, 0.0))) < 1e-15);
    }

    #[test]
    fn odd_inputs_are_rejected() {
        let odd = GrassmannElement::generator(1, GeneratorIndex::field(0));
        assert!(matches!(theta(&odd, &scalar_spec(0.1)), Err(Error::NotEven)));
        let zero_body = pair(1.0);
        assert!(matches!(lambda_functional(&zero_body, &pair(1.0), &scalar_spec(0.1)), Err(Error::ZeroBody)));
        assert!(matches!(nonlinear_rhs(&zero_body, &scalar_spec(0.1)), Err(Error::ZeroBody)));
    }

    #[test]
    fn spec_guards() {
        let mut spec = scalar_spec(-1.0);
        assert!(spec.validate().is_err());
        spec.coupling = 0.1;
        spec.spinor_dim = 2;
        assert!(spec.validate().is_err());
        spec.spinor_dim = 1;
        spec.h = CMatrix::identity(5, 5);
        assert!(matches!(spec.validate(), Err(Error::Budget { .. })));
    }

    #[test]
    fn phase_extraction_inverts_the_polar_form() {
        let r = &GrassmannElement::one(1) + &pair(0.4);
        let s = &GrassmannElement::scalar(1, c(0.2, 0.0)) + &pair(-0.7);
        let phase = crate::grassmann::exp_even(&s.scale(c(0.0, 1.0))).unwrap();
        let psi = &r * &phase;
        let (rho, s_back) = density_and_phase(&psi).unwrap();
        assert!(rho.max_abs_diff(&(&r * &r)) < 1e-14);
        assert!(s_back.max_abs_diff(&s) < 1e-14);
    }
}
