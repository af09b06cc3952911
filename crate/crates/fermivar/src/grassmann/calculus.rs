//! Derivatives, Berezin integration and shifts of the argument.

use num_complex::Complex64;

use super::{canonicalize, product_sign, GeneratorIndex, GrassmannElement, Monomial};
use crate::error::{Error, Result};

/// Left Grassmann derivative `∂/∂g`.
///
/// In every monomial containing `g`, the generator is anticommuted to the
/// leftmost position (one sign per generator it passes) and then removed.
/// Monomials without `g` are annihilated.
pub fn derive(a: &GrassmannElement, g: GeneratorIndex) -> GrassmannElement {
    let n = a.n_modes();
    assert!(g.mode < n, "generator mode outside algebra");
    let bit = g.bit(n);
    let mask = 1u64 << bit;
    let below = mask - 1;
    let mut out = GrassmannElement::zero(n);
    for (m, c) in a.terms() {
        if m & mask != 0 {
            let sign = if (m & below).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(m ^ mask, c * sign);
        }
    }
    out
}

/// The element `F(-u, -u†)`: every odd-degree term changes sign.
pub fn parity_flip(a: &GrassmannElement) -> GrassmannElement {
    let mut out = GrassmannElement::zero(a.n_modes());
    for (m, c) in a.terms() {
        let sign = if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out.add_term(m, c * sign);
    }
    out
}

/// Mask of the field and conjugate generators of the given modes, together
/// with the sign σ defined by `u_{k1} u†_{k1} u_{k2} u†_{k2} … = σ · canonical`.
fn paired_block(n_modes: usize, modes: &[usize]) -> (Monomial, f64) {
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut sequence = Vec::with_capacity(2 * sorted.len());
    for &k in &sorted {
        assert!(k < n_modes, "mode outside algebra");
        sequence.push(GeneratorIndex::field(k).bit(n_modes));
        sequence.push(GeneratorIndex::conjugate(k).bit(n_modes));
    }
    canonicalize(&sequence).expect("distinct generators")
}

/// Berezin integral `∫ 𝒟u† 𝒟u a` over every mode.
///
/// The measure is normalized by `∫ 𝒟u† 𝒟u (u_0 u†_0)(u_1 u†_1)… = 1`. With this
/// choice `∫ exp(u†Au) = (-1)^n det A`, and the norm of a Gaussian functional
/// comes out as `det(Ω†Ω + 1)` with no extra sign.
pub fn berezin_integrate(a: &GrassmannElement) -> Complex64 {
    let n = a.n_modes();
    let modes: Vec<usize> = (0..n).collect();
    let (top, sigma) = paired_block(n, &modes);
    a.coefficient(top) * sigma
}

/// Berezin integral over a subset of modes, leaving an element that depends
/// only on the remaining generators.
///
/// The paired block of the integrated modes is even, so it can be moved to
/// the front of each monomial before it is integrated out; the sign bookkeeping
/// follows the same normalization as [`berezin_integrate`].
pub fn berezin_integrate_modes(a: &GrassmannElement, modes: &[usize]) -> GrassmannElement {
    let n = a.n_modes();
    let (block, sigma) = paired_block(n, modes);
    let mut out = GrassmannElement::zero(n);
    for (m, c) in a.terms() {
        if m & block == block {
            let rest = m & !block;
            out.add_term(rest, c * sigma * product_sign(block, rest));
        }
    }
    out
}

fn check_shifts(f: &GrassmannElement, shifts: &[(GeneratorIndex, GrassmannElement)]) -> Result<()> {
    let n = f.n_modes();
    let shifted: Monomial = shifts.iter().map(|(g, _)| 1u64 << g.bit(n)).fold(0, |a, b| a | b);
    for (g, v) in shifts {
        if v.n_modes() != n {
            return Err(Error::ModeMismatch { left: n, right: v.n_modes() });
        }
        if g.mode >= n {
            return Err(Error::InvalidParameter { name: "shift", reason: "generator outside algebra".into() });
        }
        if !v.is_odd() {
            return Err(Error::InvalidParameter { name: "shift", reason: "displacements must be odd".into() });
        }
        if v.terms().any(|(m, _)| m & shifted != 0) {
            return Err(Error::InvalidParameter {
                name: "shift",
                reason: "displacements must not involve shifted generators".into(),
            });
        }
    }
    Ok(())
}

/// `F(u + δ)` by the Taylor expansion with displacements to the left of the
/// derivatives: `Σ_{g1<…<gk} δ_{g1} … δ_{gk} ∂_{gk} … ∂_{g1} F`.
///
/// The expansion terminates exactly. `F` and the displacements must live in a
/// common (enlarged) algebra, the displacements must be odd, and they must not
/// contain any of the generators being shifted.
pub fn taylor_shift(f: &GrassmannElement, shifts: &[(GeneratorIndex, GrassmannElement)]) -> Result<GrassmannElement> {
    check_shifts(f, shifts)?;
    // Each factor (1 + δ_g ∂_g) is even and squares to the identity shift, and
    // different factors commute, so applying them one after another reproduces
    // the ordered sum above.
    let mut acc = f.clone();
    for (g, v) in shifts {
        let d = derive(&acc, *g);
        acc = &acc + &(v * &d);
    }
    Ok(acc)
}

/// Direct substitution `g → g + δ_g` inside every monomial, in canonical
/// factor order. Serves as an independent oracle for [`taylor_shift`].
pub fn substitute(f: &GrassmannElement, shifts: &[(GeneratorIndex, GrassmannElement)]) -> Result<GrassmannElement> {
    check_shifts(f, shifts)?;
    let n = f.n_modes();
    let mut out = GrassmannElement::zero(n);
    for (m, c) in f.terms() {
        let mut product = GrassmannElement::scalar(n, c);
        let mut rest = m;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            let g = GeneratorIndex::from_bit(bit, n);
            let mut factor = GrassmannElement::generator(n, g);
            if let Some((_, v)) = shifts.iter().find(|(h, _)| *h == g) {
                factor = &factor + v;
            }
            product = &product * &factor;
            rest &= rest - 1;
        }
        out = &out + &product;
    }
    Ok(out)
}
