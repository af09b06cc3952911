//! Quadratic forms, conjugation, duals and the functional inner product.

use num_complex::Complex64;

use super::calculus::{berezin_integrate, berezin_integrate_modes};
use super::{analytic::exp_even, canonicalize, GeneratorIndex, GrassmannElement};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// The quadratic form `u† A u = Σ_ij u†_i A_ij u_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub matrix: CMatrix,
}

impl QuadraticForm {
    /// Wraps a square matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(Self { matrix })
    }

    /// Number of modes, equal to the matrix dimension.
    pub fn n_modes(&self) -> usize {
        self.matrix.nrows()
    }

    /// The form as an even element of the `n`-mode algebra.
    pub fn element(&self) -> GrassmannElement {
        let n = self.n_modes();
        let mut e = GrassmannElement::zero(n);
        for i in 0..n {
            for j in 0..n {
                let a = self.matrix[(i, j)];
                if a != Complex64::new(0.0, 0.0) {
                    let term =
                        GrassmannElement::product_of(n, a, &[GeneratorIndex::conjugate(i), GeneratorIndex::field(j)]);
                    e = &e + &term;
                }
            }
        }
        e
    }
}

/// The Gaussian functional `exp(u† Ω u)` (unnormalized).
pub fn gaussian_element(omega: &CMatrix) -> Result<GrassmannElement> {
    let form = QuadraticForm::new(omega.clone())?;
    exp_even(&form.element())
}

/// `∫ 𝒟u† 𝒟u exp(u† A u)`, evaluated exactly by series expansion and Berezin
/// integration. Equals `(-1)^n det A` under the measure normalization of
/// [`berezin_integrate`].
pub fn gaussian_integral(a: &QuadraticForm) -> Result<Complex64> {
    Ok(berezin_integrate(&exp_even(&a.element())?))
}

/// Hermitian conjugate: conjugates coefficients, swaps every generator with its
/// dagger partner and reverses the order of each monomial.
pub fn hermitian_conjugate(a: &GrassmannElement) -> GrassmannElement {
    let n = a.n_modes();
    let mut out = GrassmannElement::zero(n);
    let mut sequence = Vec::with_capacity(2 * n);
    for (m, c) in a.terms() {
        sequence.clear();
        let mut rest = m;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            sequence.push(GeneratorIndex::from_bit(bit, n).dagger().bit(n));
            rest &= rest - 1;
        }
        sequence.reverse();
        let (mask, sign) = canonicalize(&sequence).expect("conjugation permutes generators");
        out.add_term(mask, c.conj() * sign);
    }
    out
}

/// The dual functional
/// `Ψ*[u] = ∫ 𝒟ū† 𝒟ū exp(ū†u − u†ū) Ψ̄[ū]`.
///
/// Computed in a doubled algebra whose modes `0..n` carry `u` and modes
/// `n..2n` carry `ū`; the barred modes are integrated out and the result is
/// restricted back to the original algebra.
pub fn dual_functional(psi: &GrassmannElement) -> Result<GrassmannElement> {
    let n = psi.n_modes();
    let total = 2 * n;
    if total > super::MAX_MODES {
        return Err(Error::Budget { what: "doubled mode count", value: total, limit: super::MAX_MODES });
    }
    let bar = hermitian_conjugate(psi).embed(n, total);
    let mut exponent = GrassmannElement::zero(total);
    let one = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let forward =
            GrassmannElement::product_of(total, one, &[GeneratorIndex::conjugate(n + k), GeneratorIndex::field(k)]);
        let backward =
            GrassmannElement::product_of(total, one, &[GeneratorIndex::conjugate(k), GeneratorIndex::field(n + k)]);
        exponent = &(&exponent + &forward) - &backward;
    }
    let kernel = exp_even(&exponent)?;
    let barred: Vec<usize> = (n..total).collect();
    let integrated = berezin_integrate_modes(&(&kernel * &bar), &barred);
    integrated.restrict(0, n)
}

/// Inner product `⟨Ψ₁|Ψ₂⟩ = ∫ 𝒟u† 𝒟u Ψ₁* Ψ₂`.
pub fn inner_product(psi1: &GrassmannElement, psi2: &GrassmannElement) -> Result<Complex64> {
    let dual = dual_functional(psi1)?;
    Ok(berezin_integrate(&dual.multiply(psi2)?))
}

/// Normalized expectation value `∫ Ψ* O Ψ / ∫ Ψ* Ψ`.
pub fn expectation(psi: &GrassmannElement, o: &GrassmannElement) -> Result<Complex64> {
    let dual = dual_functional(psi)?;
    let norm = berezin_integrate(&dual.multiply(psi)?);
    let scale = psi.coefficient_norm().powi(2);
    if norm.norm() <= 1e-13 * scale || norm.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let value = berezin_integrate(&(&dual.multiply(o)? * psi));
    Ok(value / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GeneratorIndex as G;
    use crate::linalg::c;

    fn pair(n: usize, k: usize) -> GrassmannElement {
        &GrassmannElement::generator(n, G::conjugate(k)) * &GrassmannElement::generator(n, G::field(k))
    }

    #[test]
    fn conjugate_of_imaginary_pair() {
        let x = pair(1, 0).scale(c(0.0, 1.0));
        assert_eq!(hermitian_conjugate(&x), pair(1, 0).scale(c(0.0, -1.0)));
    }

    #[test]
    fn conjugate_of_scalar() {
        let x = GrassmannElement::scalar(2, c(1.0, 2.0));
        assert_eq!(hermitian_conjugate(&x), GrassmannElement::scalar(2, c(1.0, -2.0)));
    }

    #[test]
    fn zero_form_integrates_to_zero() {
        let a = QuadraticForm::new(CMatrix::zeros(1, 1)).unwrap();
        assert_eq!(gaussian_integral(&a).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn one_mode_gaussian_integral() {
        let a = QuadraticForm::new(CMatrix::from_element(1, 1, c(0.7, 0.2))).unwrap();
        let by_hand = berezin_integrate(&(&GrassmannElement::one(1) + &pair(1, 0).scale(c(0.7, 0.2))));
        assert_eq!(gaussian_integral(&a).unwrap(), by_hand);
        assert_eq!(by_hand, c(-0.7, -0.2));
    }

    #[test]
    fn diagonal_two_mode_gaussian_integral() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 1.0)]);
        let value = gaussian_integral(&QuadraticForm::new(m).unwrap()).unwrap();
        assert!((value - c(6.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn norm_of_one_mode_gaussian() {
        let psi = gaussian_element(&CMatrix::from_element(1, 1, c(2.0, 0.0))).unwrap();
        assert!((inner_product(&psi, &psi).unwrap() - c(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dual_of_one_mode_gaussian() {
        let w = c(0.4, -0.3);
        let psi = gaussian_element(&CMatrix::from_element(1, 1, w)).unwrap();
        let expected = gaussian_element(&CMatrix::from_element(1, 1, w.conj().inv())).unwrap().scale(-w.conj());
        assert!(dual_functional(&psi).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn dual_of_unit_is_paired_top_monomial() {
        let dual = dual_functional(&GrassmannElement::one(1)).unwrap();
        let expected = GrassmannElement::product_of(1, c(1.0, 0.0), &[G::field(0), G::conjugate(0)]);
        assert_eq!(dual, expected);
    }

    #[test]
    fn expectation_of_unit() {
        let psi = gaussian_element(&CMatrix::from_element(1, 1, c(0.5, 0.1))).unwrap();
        let e = expectation(&psi, &GrassmannElement::one(1)).unwrap();
        assert!((e - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fluctuation_moment_one_mode() {
        let psi = gaussian_element(&CMatrix::from_element(1, 1, c(0.1, 0.0))).unwrap();
        let o = GrassmannElement::product_of(1, c(1.0, 0.0), &[G::field(0), G::conjugate(0)]);
        let e = expectation(&psi, &o).unwrap();
        assert!((e - c(-0.1 / 1.01, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_norm_is_reported() {
        let odd = GrassmannElement::zero(1);
        assert_eq!(expectation(&odd, &GrassmannElement::one(1)), Err(Error::ZeroNorm));
    }
}
