//! Exact arithmetic over a finite Grassmann algebra.
//!
//! An algebra with `n` modes has `2n` generators: the field generators
//! `u_0 … u_{n-1}` and the conjugate generators `u†_0 … u†_{n-1}`. The
//! canonical generator order is all field generators by mode, then all
//! conjugate generators by mode. Generator `Field(k)` occupies bit `k` of a
//! monomial mask and `Conjugate(k)` occupies bit `n + k`, so the canonical order
//! is increasing bit position and a monomial is just a `u64`.
//!
//! Coefficients are complex floating point numbers. Terms whose coefficient is
//! exactly zero are dropped; [`GrassmannElement::pruned`] applies an explicit
//! drop tolerance for chained products.

mod analytic;
mod calculus;
mod functional;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use analytic::{exp_even, inverse_even, ln_even};
pub use calculus::{berezin_integrate, berezin_integrate_modes, derive, parity_flip, substitute, taylor_shift};
pub use functional::{
    dual_functional, expectation, gaussian_element, gaussian_integral, hermitian_conjugate, inner_product,
    QuadraticForm,
};

/// Largest supported mode count (two generators per mode must fit in a `u64`).
pub const MAX_MODES: usize = 32;

/// Whether a generator is a field generator `u` or its conjugate `u†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    Field,
    Conjugate,
}

/// One of the `2n` generators of an `n`-mode algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorIndex {
    pub kind: GeneratorKind,
    pub mode: usize,
}

impl GeneratorIndex {
    /// Field generator `u_mode`.
    pub fn field(mode: usize) -> Self {
        Self { kind: GeneratorKind::Field, mode }
    }

    /// Conjugate generator `u†_mode`.
    pub fn conjugate(mode: usize) -> Self {
        Self { kind: GeneratorKind::Conjugate, mode }
    }

    /// The partner generator of the opposite kind on the same mode.
    pub fn dagger(self) -> Self {
        match self.kind {
            GeneratorKind::Field => Self::conjugate(self.mode),
            GeneratorKind::Conjugate => Self::field(self.mode),
        }
    }

    /// Bit position in an algebra with `n_modes` modes.
    pub fn bit(self, n_modes: usize) -> u32 {
        match self.kind {
            GeneratorKind::Field => self.mode as u32,
            GeneratorKind::Conjugate => (n_modes + self.mode) as u32,
        }
    }

    /// Inverse of [`GeneratorIndex::bit`].
    pub fn from_bit(bit: u32, n_modes: usize) -> Self {
        let b = bit as usize;
        if b < n_modes {
            Self::field(b)
        } else {
            Self::conjugate(b - n_modes)
        }
    }

    /// All `2n` generators in canonical order.
    pub fn all(n_modes: usize) -> impl Iterator<Item = GeneratorIndex> {
        (0..2 * n_modes as u32).map(move |b| Self::from_bit(b, n_modes))
    }
}

/// A monomial, encoded as the bit set of its generators in canonical order.
pub type Monomial = u64;

/// Sign `(-1)^k` where `k` counts transpositions needed to bring the product
/// `m_a · m_b` of two canonical monomials into canonical order.
///
/// The product vanishes when the masks overlap; callers check that first.
#[inline]
pub fn product_sign(a: Monomial, b: Monomial) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += a.checked_shr(j + 1).unwrap_or(0).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Canonicalizes a product of generators given as a sequence of bit
/// positions: returns the monomial mask and the permutation sign, or `None`
/// if a generator repeats (the product is zero).
pub fn canonicalize(sequence: &[u32]) -> Option<(Monomial, f64)> {
    let mut mask: Monomial = 0;
    let mut sign = 1.0;
    for &bit in sequence {
        let g = 1u64 << bit;
        if mask & g != 0 {
            return None;
        }
        sign *= product_sign(mask, g);
        mask |= g;
    }
    Some((mask, sign))
}

/// Element of the Grassmann algebra over `n_modes` modes.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement {
    n_modes: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl GrassmannElement {
    /// The zero element.
    pub fn zero(n_modes: usize) -> Self {
        assert!(n_modes <= MAX_MODES, "at most {MAX_MODES} modes are supported");
        Self { n_modes, terms: BTreeMap::new() }
    }

    /// The unit element.
    pub fn one(n_modes: usize) -> Self {
        Self::scalar(n_modes, Complex64::new(1.0, 0.0))
    }

    /// A multiple of the unit element.
    pub fn scalar(n_modes: usize, value: Complex64) -> Self {
        let mut e = Self::zero(n_modes);
        e.add_term(0, value);
        e
    }

    /// A single generator.
    pub fn generator(n_modes: usize, g: GeneratorIndex) -> Self {
        assert!(g.mode < n_modes, "generator mode {} outside algebra of {n_modes} modes", g.mode);
        let mut e = Self::zero(n_modes);
        e.add_term(1u64 << g.bit(n_modes), Complex64::new(1.0, 0.0));
        e
    }

    /// The ordered product `coefficient · g_1 g_2 … g_k` of the given generators.
    pub fn product_of(n_modes: usize, coefficient: Complex64, generators: &[GeneratorIndex]) -> Self {
        let bits: Vec<u32> = generators
            .iter()
            .map(|g| {
                assert!(g.mode < n_modes, "generator mode outside algebra");
                g.bit(n_modes)
            })
            .collect();
        let mut e = Self::zero(n_modes);
        if let Some((mask, sign)) = canonicalize(&bits) {
            e.add_term(mask, coefficient * sign);
        }
        e
    }

    /// Builds an element directly from canonical monomials.
    pub fn from_terms(n_modes: usize, terms: impl IntoIterator<Item = (Monomial, Complex64)>) -> Self {
        let mut e = Self::zero(n_modes);
        let limit = if n_modes == 32 { u64::MAX } else { (1u64 << (2 * n_modes)) - 1 };
        for (m, c) in terms {
            assert!(m & !limit == 0, "monomial uses generators outside the algebra");
            e.add_term(m, c);
        }
        e
    }

    /// Number of modes of the algebra this element lives in.
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of generators, `2 n_modes`.
    pub fn n_generators(&self) -> usize {
        2 * self.n_modes
    }

    /// Mask of the top monomial containing every generator.
    pub fn top_monomial(&self) -> Monomial {
        if self.n_modes == 32 {
            u64::MAX
        } else {
            (1u64 << (2 * self.n_modes)) - 1
        }
    }

    /// Non-zero terms in canonical (ascending mask) order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Alias of [`GrassmannElement::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Coefficient of a monomial.
    pub fn coefficient(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    /// Scalar part (coefficient of the empty monomial).
    pub fn body(&self) -> Complex64 {
        self.coefficient(0)
    }

    /// Element without its scalar part.
    pub fn soul(&self) -> Self {
        let mut e = self.clone();
        e.terms.remove(&0);
        e
    }

    /// True when every monomial has even degree (zero counts as even).
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// True when every monomial has odd degree (zero counts as odd).
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    /// Adds `value` to the coefficient of `m`, dropping exact zeros.
    pub fn add_term(&mut self, m: Monomial, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += value;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    /// Copy with every coefficient of magnitude at most `tol` removed.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            n_modes: self.n_modes,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(&m, &c)| (m, c)).collect(),
        }
    }

    /// Sum of absolute squares of the coefficients, square-rooted.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient difference against another element of the same algebra.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scale(&self, factor: Complex64) -> Self {
        let mut e = Self::zero(self.n_modes);
        for (&m, &c) in &self.terms {
            e.add_term(m, c * factor);
        }
        e
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut e = Self::zero(self.n_modes);
        for (&m, &c) in &self.terms {
            e.add_term(m, f(c));
        }
        e
    }

    /// Checked sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_modes(self, other)?;
        let mut e = self.clone();
        for (&m, &c) in &other.terms {
            e.add_term(m, c);
        }
        Ok(e)
    }

    /// Checked product of two elements of the same algebra.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_modes(self, other)?;
        let mut e = Self::zero(self.n_modes);
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                if ma & mb == 0 {
                    e.add_term(ma | mb, ca * cb * product_sign(ma, mb));
                }
            }
        }
        Ok(e)
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n_modes);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses the element in a larger algebra with `total_modes` modes,
    /// mapping mode `k` to mode `offset + k` for both generator kinds.
    ///
    /// Field generators stay ahead of conjugate generators and the relative
    /// order inside each kind is preserved, so no sign changes occur.
    pub fn embed(&self, offset: usize, total_modes: usize) -> Self {
        assert!(offset + self.n_modes <= total_modes, "embedding does not fit");
        let mut e = Self::zero(total_modes);
        for (&m, &c) in &self.terms {
            e.add_term(remap(m, self.n_modes, total_modes, offset), c);
        }
        e
    }

    /// Inverse of [`GrassmannElement::embed`]: extracts modes
    /// `offset .. offset + n_modes` into an algebra of `n_modes` modes.
    ///
    /// Fails if a term involves generators outside that window.
    pub fn restrict(&self, offset: usize, n_modes: usize) -> Result<Self> {
        let total = self.n_modes;
        let window: Monomial =
            (0..n_modes).map(|k| (1u64 << (offset + k)) | (1u64 << (total + offset + k))).fold(0, |a, b| a | b);
        let mut e = Self::zero(n_modes);
        for (&m, &c) in &self.terms {
            if m & !window != 0 {
                return Err(Error::InvalidParameter {
                    name: "element",
                    reason: "term involves generators outside the restriction window".into(),
                });
            }
            let mut out = 0u64;
            for k in 0..n_modes {
                if m & (1u64 << (offset + k)) != 0 {
                    out |= 1u64 << k;
                }
                if m & (1u64 << (total + offset + k)) != 0 {
                    out |= 1u64 << (n_modes + k);
                }
            }
            e.add_term(out, c);
        }
        Ok(e)
    }

    /// Renders a monomial as a product of generator names in canonical order.
    pub fn monomial_name(m: Monomial, n_modes: usize) -> String {
        if m == 0 {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut rest = m;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            let g = GeneratorIndex::from_bit(bit, n_modes);
            parts.push(match g.kind {
                GeneratorKind::Field => format!("u{}", g.mode),
                GeneratorKind::Conjugate => format!("u†{}", g.mode),
            });
            rest &= rest - 1;
        }
        parts.join("·")
    }
}

fn remap(m: Monomial, from_modes: usize, to_modes: usize, offset: usize) -> Monomial {
    let mut out = 0u64;
    let mut rest = m;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        let g = GeneratorIndex::from_bit(bit, from_modes);
        let moved = GeneratorIndex { kind: g.kind, mode: g.mode + offset };
        out |= 1u64 << moved.bit(to_modes);
        rest &= rest - 1;
    }
    out
}

fn check_modes(a: &GrassmannElement, b: &GrassmannElement) -> Result<()> {
    if a.n_modes != b.n_modes {
        Err(Error::ModeMismatch { left: a.n_modes, right: b.n_modes })
    } else {
        Ok(())
    }
}

/// Checked product, see [`GrassmannElement::multiply`].
pub fn multiply(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    a.multiply(b)
}

/// Stable rendering: monomials in canonical order, each with its signed
/// coefficient in scientific notation.
impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:+.12e}{:+.12e}i)·{}", c.re, c.im, Self::monomial_name(m, self.n_modes))?;
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrassmannElement[{} modes]{{{}}}", self.n_modes, self)
    }
}

impl std::ops::Add for &GrassmannElement {
    type Output = GrassmannElement;
    /// Panics on mismatched mode counts; use [`GrassmannElement::try_add`] to handle that case.
    fn add(self, rhs: Self) -> GrassmannElement {
        self.try_add(rhs).expect("adding elements of different algebras")
    }
}

impl std::ops::Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: Self) -> GrassmannElement {
        self.try_add(&rhs.scale(Complex64::new(-1.0, 0.0))).expect("subtracting elements of different algebras")
    }
}

impl std::ops::Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl std::ops::Mul for &GrassmannElement {
    type Output = GrassmannElement;
    /// Panics on mismatched mode counts; use [`GrassmannElement::multiply`] to handle that case.
    fn mul(self, rhs: Self) -> GrassmannElement {
        self.multiply(rhs).expect("multiplying elements of different algebras")
    }
}

impl std::ops::Mul<Complex64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Complex64) -> GrassmannElement {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize, k: usize) -> GrassmannElement {
        GrassmannElement::generator(n, GeneratorIndex::field(k))
    }
    fn ud(n: usize, k: usize) -> GrassmannElement {
        GrassmannElement::generator(n, GeneratorIndex::conjugate(k))
    }

    #[test]
    fn generators_are_nilpotent() {
        assert!((&u(1, 0) * &u(1, 0)).is_zero());
    }

    #[test]
    fn generators_anticommute() {
        let a = &u(1, 0) * &ud(1, 0);
        let b = &ud(1, 0) * &u(1, 0);
        assert_eq!(a, -&b);
    }

    #[test]
    fn product_of_commuting_pairs_expands() {
        let one = GrassmannElement::one(2);
        let p0 = &ud(2, 0) * &u(2, 0);
        let p1 = &ud(2, 1) * &u(2, 1);
        let lhs = &(&one + &p0) * &(&one + &p1);
        let expected = &(&(&one + &p0) + &p1) + &(&p0 * &p1);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn mismatched_modes_are_rejected() {
        assert_eq!(multiply(&u(1, 0), &u(2, 0)), Err(Error::ModeMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn canonicalize_counts_transpositions() {
        assert_eq!(canonicalize(&[1, 0]), Some((0b11, -1.0)));
        assert_eq!(canonicalize(&[2, 0, 1]), Some((0b111, 1.0)));
        assert_eq!(canonicalize(&[1, 1]), None);
    }

    #[test]
    fn embed_and_restrict_round_trip() {
        let x = &(&ud(2, 1) * &u(2, 0)) + &GrassmannElement::one(2);
        let big = x.embed(3, 6);
        assert_eq!(big.restrict(3, 2).unwrap(), x);
        assert!(big.restrict(0, 2).is_err());
    }

    #[test]
    fn display_is_stable() {
        let x = &(&ud(1, 0) * &u(1, 0)) * Complex64::new(2.0, 0.0);
        assert_eq!(x.to_string(), "(-2.000000000000e0+0.000000000000e0i)·u0·u†0");
    }
}
