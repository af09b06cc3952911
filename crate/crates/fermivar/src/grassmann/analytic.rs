//! Analytic functions of even elements as terminating power series.
//!
//! An even element splits into its scalar body `b` and a nilpotent soul `ν`,
//! with `ν^(n+1) = 0` for `n` modes. Each function is evaluated through its
//! Taylor series around `b`, which therefore has at most `n + 1` terms.

use num_complex::Complex64;

use super::GrassmannElement;
use crate::error::{Error, Result};

fn split_even(a: &GrassmannElement) -> Result<(Complex64, GrassmannElement)> {
    if !a.is_even() {
        return Err(Error::NotEven);
    }
    Ok((a.body(), a.soul()))
}

/// Sums `Σ_k coefficient(k) x^k` for nilpotent `x` until the power vanishes.
fn nilpotent_series(x: &GrassmannElement, coefficient: impl Fn(u32) -> Complex64) -> GrassmannElement {
    let n = x.n_modes();
    let mut acc = GrassmannElement::scalar(n, coefficient(0));
    let mut power = GrassmannElement::one(n);
    let mut k = 0u32;
    loop {
        k += 1;
        power = &power * x;
        if power.is_zero() || k as usize > x.n_generators() {
            break;
        }
        acc = &acc + &power.scale(coefficient(k));
    }
    acc
}

/// `exp(a)` for even `a`.
pub fn exp_even(a: &GrassmannElement) -> Result<GrassmannElement> {
    let (body, soul) = split_even(a)?;
    let mut factorial = 1.0;
    let mut factorials = vec![1.0];
    for k in 1..=a.n_generators() {
        factorial *= k as f64;
        factorials.push(factorial);
    }
    let series = nilpotent_series(&soul, |k| Complex64::new(1.0 / factorials[k as usize], 0.0));
    Ok(series.scale(body.exp()))
}

/// Principal logarithm `ln(a)` for even `a` with non-zero body.
pub fn ln_even(a: &GrassmannElement) -> Result<GrassmannElement> {
    let (body, soul) = split_even(a)?;
    if body == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroBody);
    }
    let x = soul.scale(body.inv());
    let mut series = nilpotent_series(&x, |k| {
        if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            Complex64::new(sign / k as f64, 0.0)
        }
    });
    series.add_term(0, body.ln());
    Ok(series)
}

/// Multiplicative inverse of an even element with non-zero body.
pub fn inverse_even(a: &GrassmannElement) -> Result<GrassmannElement> {
    let (body, soul) = split_even(a)?;
    if body == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroBody);
    }
    let x = soul.scale(body.inv());
    let series = nilpotent_series(&x, |k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    Ok(series.scale(body.inv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GeneratorIndex as G;

    fn pair(n: usize, k: usize) -> GrassmannElement {
        &GrassmannElement::generator(n, G::conjugate(k)) * &GrassmannElement::generator(n, G::field(k))
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert_eq!(exp_even(&GrassmannElement::zero(2)).unwrap(), GrassmannElement::one(2));
    }

    #[test]
    fn inverse_of_one_plus_pair() {
        let x = &GrassmannElement::one(1) + &pair(1, 0);
        let expected = &GrassmannElement::one(1) - &pair(1, 0);
        assert_eq!(inverse_even(&x).unwrap(), expected);
    }

    #[test]
    fn ln_inverts_exp() {
        let c = Complex64::new(0.3, -1.2);
        let x = pair(1, 0).scale(c);
        let back = ln_even(&exp_even(&x).unwrap()).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn odd_and_zero_body_inputs_are_rejected() {
        let odd = GrassmannElement::generator(1, G::field(0));
        assert_eq!(exp_even(&odd), Err(Error::NotEven));
        assert_eq!(ln_even(&pair(1, 0)), Err(Error::ZeroBody));
        assert_eq!(inverse_even(&pair(1, 0)), Err(Error::ZeroBody));
    }
}
