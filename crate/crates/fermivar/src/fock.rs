//! Operators on the Grassmann space realized as matrices.
//!
//! The monomials of an algebra with `2d` generators form an orthonormal basis
//! of a `2^{2d}`-dimensional space, indexed by the monomial mask. Left
//! multiplication by a generator and the left derivative with respect to it
//! act on this basis as signed bit flips. They are adjoint to each other and
//! satisfy the canonical anticommutation relations.
//!
//! Field operators in this crate are at most bilinear in these elementary
//! maps, so operators are stored as lists of elementary products and applied
//! column by column. Matrices with `2^{16}` rows are never stored densely;
//! norms of commutator defects are accumulated one column at a time.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorIndex, GrassmannElement};
use crate::linalg::CMatrix;

/// Largest number of generators for which operator matrices are built.
pub const MAX_GENERATORS: usize = 16;

/// Elementary map on the monomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElemOp {
    /// Left multiplication by the generator at this bit.
    Mul(u32),
    /// Left derivative with respect to the generator at this bit.
    Der(u32),
}

impl ElemOp {
    /// Multiplication by a generator of an `n_modes`-mode algebra.
    pub fn mul(g: GeneratorIndex, n_modes: usize) -> Self {
        ElemOp::Mul(g.bit(n_modes))
    }

    /// Derivative with respect to a generator of an `n_modes`-mode algebra.
    pub fn der(g: GeneratorIndex, n_modes: usize) -> Self {
        ElemOp::Der(g.bit(n_modes))
    }

    /// Image of basis monomial `m`: the new monomial and its sign, or `None`.
    #[inline]
    pub fn apply(self, m: u64) -> Option<(u64, f64)> {
        let (bit, want_set) = match self {
            ElemOp::Mul(b) => (b, false),
            ElemOp::Der(b) => (b, true),
        };
        let mask = 1u64 << bit;
        if (m & mask != 0) != want_set {
            return None;
        }
        let sign = if (m & (mask - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        Some((m ^ mask, sign))
    }

    /// Adjoint map in the orthonormal monomial basis.
    pub fn adjoint(self) -> Self {
        match self {
            ElemOp::Mul(b) => ElemOp::Der(b),
            ElemOp::Der(b) => ElemOp::Mul(b),
        }
    }
}

/// Dense accumulator for one column, tracking which rows were touched.
pub struct Accumulator {
    values: Vec<Complex64>,
    touched: Vec<u32>,
    flags: Vec<bool>,
}

impl Accumulator {
    /// Accumulator for vectors of length `dim`.
    pub fn new(dim: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); dim], touched: Vec::new(), flags: vec![false; dim] }
    }

    /// Adds `value` to row `row`.
    #[inline]
    pub fn add(&mut self, row: u64, value: Complex64) {
        let r = row as usize;
        if !self.flags[r] {
            self.flags[r] = true;
            self.touched.push(r as u32);
        }
        self.values[r] += value;
    }

    /// Touched rows with their current values.
    pub fn entries(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.touched.iter().map(|&r| (r as u64, self.values[r as usize]))
    }

    /// Moves the entries out into a vector and resets the accumulator.
    pub fn drain(&mut self) -> Vec<(u64, Complex64)> {
        let out: Vec<(u64, Complex64)> = self.entries().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect();
        self.clear();
        out
    }

    /// Moves the non-zero entries into `out` (cleared first) and resets the accumulator.
    pub fn drain_into(&mut self, out: &mut Vec<(u64, Complex64)>) {
        out.clear();
        for &r in &self.touched {
            let v = self.values[r as usize];
            if v != Complex64::new(0.0, 0.0) {
                out.push((r as u64, v));
            }
            self.values[r as usize] = Complex64::new(0.0, 0.0);
            self.flags[r as usize] = false;
        }
        self.touched.clear();
    }

    /// Squared Euclidean norm of the accumulated vector.
    pub fn norm_sqr(&self) -> f64 {
        self.touched.iter().map(|&r| self.values[r as usize].norm_sqr()).sum()
    }

    /// Resets every touched row to zero.
    pub fn clear(&mut self) {
        for &r in &self.touched {
            self.values[r as usize] = Complex64::new(0.0, 0.0);
            self.flags[r as usize] = false;
        }
        self.touched.clear();
    }
}

/// An operator on the monomial basis that can be applied one column at a time.
pub trait Operator {
    /// Number of generators `2d` of the underlying algebra.
    fn n_generators(&self) -> usize;

    /// Adds `scale · O|m⟩` to the accumulator.
    fn apply_basis(&self, m: u64, scale: Complex64, acc: &mut Accumulator);

    /// Matrix dimension `2^{2d}`.
    fn dim(&self) -> usize {
        1usize << self.n_generators()
    }
}

/// `Σ cₖ Eₖ`, a linear combination of elementary maps.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp {
    pub n_generators: usize,
    pub terms: Vec<(ElemOp, Complex64)>,
}

impl LinearOp {
    /// The zero combination.
    pub fn zero(n_generators: usize) -> Self {
        Self { n_generators, terms: Vec::new() }
    }

    /// Adds `coefficient · op`.
    pub fn push(&mut self, op: ElemOp, coefficient: Complex64) {
        if coefficient != Complex64::new(0.0, 0.0) {
            self.terms.push((op, coefficient));
        }
    }

    /// `Σ aᵢ Lᵢ` for a list of weighted operators.
    pub fn combination(n_generators: usize, parts: &[(Complex64, &LinearOp)]) -> Self {
        let mut out = Self::zero(n_generators);
        for (w, op) in parts {
            for &(e, c) in &op.terms {
                out.push(e, c * w);
            }
        }
        out
    }

    /// Adjoint in the monomial basis.
    pub fn adjoint(&self) -> Self {
        Self {
            n_generators: self.n_generators,
            terms: self.terms.iter().map(|&(e, c)| (e.adjoint(), c.conj())).collect(),
        }
    }

    /// Product `self · other` as a bilinear operator.
    pub fn then_after(&self, other: &LinearOp) -> QuadOp {
        let mut q = QuadOp::zero(self.n_generators);
        for &(l, cl) in &self.terms {
            for &(r, cr) in &other.terms {
                q.push(l, r, cl * cr);
            }
        }
        q
    }
}

impl Operator for LinearOp {
    fn n_generators(&self) -> usize {
        self.n_generators
    }

    fn apply_basis(&self, m: u64, scale: Complex64, acc: &mut Accumulator) {
        for &(e, c) in &self.terms {
            if let Some((m2, s)) = e.apply(m) {
                acc.add(m2, c * scale * s);
            }
        }
    }
}

/// `Σ cₖ Lₖ Rₖ + c₀ 1`, a bilinear combination of elementary maps.
///
/// Terms are grouped by their right factor so each is applied once per column.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOp {
    pub n_generators: usize,
    groups: Vec<(ElemOp, Vec<(ElemOp, Complex64)>)>,
    pub constant: Complex64,
}

impl QuadOp {
    /// The zero operator.
    pub fn zero(n_generators: usize) -> Self {
        Self { n_generators, groups: Vec::new(), constant: Complex64::new(0.0, 0.0) }
    }

    /// Adds `coefficient · left · right`.
    pub fn push(&mut self, left: ElemOp, right: ElemOp, coefficient: Complex64) {
        if coefficient == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.groups.iter_mut().find(|(r, _)| *r == right) {
            Some((_, lefts)) => match lefts.iter_mut().find(|(l, _)| *l == left) {
                Some((_, c)) => *c += coefficient,
                None => lefts.push((left, coefficient)),
            },
            None => self.groups.push((right, vec![(left, coefficient)])),
        }
    }

    /// All terms as `(left, right, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (ElemOp, ElemOp, Complex64)> + '_ {
        self.groups.iter().flat_map(|(r, lefts)| lefts.iter().map(move |&(l, c)| (l, *r, c)))
    }

    /// `Σ wᵢ Qᵢ`.
    pub fn combination(n_generators: usize, parts: &[(Complex64, &QuadOp)]) -> Self {
        let mut out = Self::zero(n_generators);
        for (w, op) in parts {
            for (l, r, c) in op.terms() {
                out.push(l, r, c * w);
            }
            out.constant += op.constant * w;
        }
        out
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::combination(self.n_generators, &[(factor, self)])
    }

    /// Adjoint in the monomial basis.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_generators);
        for (l, r, c) in self.terms() {
            out.push(r.adjoint(), l.adjoint(), c.conj());
        }
        out.constant = self.constant.conj();
        out
    }

    /// Number of stored elementary products.
    pub fn n_terms(&self) -> usize {
        self.groups.iter().map(|(_, l)| l.len()).sum()
    }
}

impl Operator for QuadOp {
    fn n_generators(&self) -> usize {
        self.n_generators
    }

    fn apply_basis(&self, m: u64, scale: Complex64, acc: &mut Accumulator) {
        if self.constant != Complex64::new(0.0, 0.0) {
            acc.add(m, self.constant * scale);
        }
        for (r, lefts) in &self.groups {
            if let Some((m1, s1)) = r.apply(m) {
                for &(l, c) in lefts {
                    if let Some((m2, s2)) = l.apply(m1) {
                        acc.add(m2, c * scale * (s1 * s2));
                    }
                }
            }
        }
    }
}

/// Checks the generator budget shared by all operator constructions.
pub fn check_budget(n_generators: usize) -> Result<()> {
    if n_generators > MAX_GENERATORS {
        Err(Error::Budget { what: "generator count", value: n_generators, limit: MAX_GENERATORS })
    } else {
        Ok(())
    }
}

/// Applies an operator to a Grassmann element viewed as a vector.
pub fn apply<O: Operator + ?Sized>(op: &O, psi: &GrassmannElement) -> Result<GrassmannElement> {
    if psi.n_generators() != op.n_generators() {
        return Err(Error::DimensionMismatch { expected: op.n_generators(), found: psi.n_generators() });
    }
    let mut acc = Accumulator::new(op.dim());
    for (m, c) in psi.terms() {
        op.apply_basis(m, c, &mut acc);
    }
    Ok(GrassmannElement::from_terms(psi.n_modes(), acc.drain()))
}

/// Dense matrix of an operator; only for small spaces.
pub fn to_dense<O: Operator + ?Sized>(op: &O) -> Result<CMatrix> {
    if op.n_generators() > 10 {
        return Err(Error::Budget { what: "dense generator count", value: op.n_generators(), limit: 10 });
    }
    let dim = op.dim();
    let mut out = CMatrix::zeros(dim, dim);
    let mut acc = Accumulator::new(dim);
    for j in 0..dim {
        op.apply_basis(j as u64, Complex64::new(1.0, 0.0), &mut acc);
        for (i, v) in acc.drain() {
            out[(i as usize, j)] = v;
        }
    }
    Ok(out)
}

/// A term of an operator expression: `coefficient · A₁ A₂ … Aₖ` (rightmost first).
pub struct Product<'a> {
    pub coefficient: Complex64,
    pub factors: Vec<&'a dyn Operator>,
}

impl<'a> Product<'a> {
    /// `coefficient · factors[0] · factors[1] · …`.
    pub fn new(coefficient: Complex64, factors: Vec<&'a dyn Operator>) -> Self {
        Self { coefficient, factors }
    }
}

/// Frobenius norm of `Σ coefficient · Π factors`, accumulated column by column.
pub fn expression_norm(n_generators: usize, expression: &[Product<'_>]) -> Result<f64> {
    check_budget(n_generators)?;
    for p in expression {
        for f in &p.factors {
            if f.n_generators() != n_generators {
                return Err(Error::DimensionMismatch { expected: n_generators, found: f.n_generators() });
            }
        }
    }
    let dim = 1usize << n_generators;
    let mut total = Accumulator::new(dim);
    let mut stage = Accumulator::new(dim);
    let mut current: Vec<(u64, Complex64)> = Vec::new();
    let mut sum = 0.0;
    for j in 0..dim as u64 {
        for p in expression {
            let (last, rest) = match p.factors.split_first() {
                None => {
                    total.add(j, p.coefficient);
                    continue;
                }
                Some(split) => split,
            };
            // Inner factors pass through the staging buffer; the leftmost
            // factor writes straight into the column total.
            current.clear();
            current.push((j, p.coefficient));
            for f in rest.iter().rev() {
                for &(m, v) in &current {
                    f.apply_basis(m, v, &mut stage);
                }
                stage.drain_into(&mut current);
            }
            for &(m, v) in &current {
                last.apply_basis(m, v, &mut total);
            }
        }
        sum += total.norm_sqr();
        total.clear();
    }
    Ok(sum.sqrt())
}

/// Frobenius norm of a single operator.
pub fn frobenius_norm(op: &dyn Operator) -> Result<f64> {
    expression_norm(op.n_generators(), &[Product::new(Complex64::new(1.0, 0.0), vec![op])])
}

/// `‖[A, B] − target‖_F` where `target` is a weighted operator list.
pub fn commutator_defect(a: &dyn Operator, b: &dyn Operator, target: &[(Complex64, &dyn Operator)]) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let mut expr = vec![Product::new(one, vec![a, b]), Product::new(-one, vec![b, a])];
    for &(w, op) in target {
        expr.push(Product::new(-w, vec![op]));
    }
    expression_norm(a.n_generators(), &expr)
}

/// `‖{A, B} − s·1‖_F`.
pub fn anticommutator_defect(a: &dyn Operator, b: &dyn Operator, s: Complex64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let expr = vec![Product::new(one, vec![a, b]), Product::new(one, vec![b, a]), Product::new(-s, vec![])];
    expression_norm(a.n_generators(), &expr)
}

/// `{A, B}` of two elementary maps, which is always a multiple of the identity.
fn elementary_anticommutator(a: ElemOp, b: ElemOp) -> f64 {
    match (a, b) {
        (ElemOp::Mul(i), ElemOp::Der(j)) | (ElemOp::Der(i), ElemOp::Mul(j)) if i == j => 1.0,
        _ => 0.0,
    }
}

/// Exact commutator `[A, B]` of two bilinear operators, again bilinear.
///
/// Elementary maps obey `{Mul_i, Der_j} = δ_ij` and anticommute otherwise, so
/// `[AB, CD] = {B,C} AD − {B,D} AC + {A,C} DB − {A,D} CB`.
pub fn quad_commutator(a: &QuadOp, b: &QuadOp) -> Result<QuadOp> {
    if a.n_generators != b.n_generators {
        return Err(Error::DimensionMismatch { expected: a.n_generators, found: b.n_generators });
    }
    let mut out = QuadOp::zero(a.n_generators);
    for (l1, r1, c1) in a.terms() {
        for (l2, r2, c2) in b.terms() {
            let w = c1 * c2;
            let bc = elementary_anticommutator(r1, l2);
            if bc != 0.0 {
                out.push(l1, r2, w * bc);
            }
            let bd = elementary_anticommutator(r1, r2);
            if bd != 0.0 {
                out.push(l1, l2, -w * bd);
            }
            let ac = elementary_anticommutator(l1, l2);
            if ac != 0.0 {
                out.push(r2, r1, w * ac);
            }
            let ad = elementary_anticommutator(l1, r2);
            if ad != 0.0 {
                out.push(l2, r1, -w * ad);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::derive;
    use crate::linalg::c;
    use crate::random;

    #[test]
    fn elementary_maps_match_grassmann_calculus() {
        let mut rng = random::rng(3);
        let x = random::element(&mut rng, 2);
        for g in GeneratorIndex::all(2) {
            let mut mul = LinearOp::zero(4);
            mul.push(ElemOp::mul(g, 2), c(1.0, 0.0));
            let expected = &GrassmannElement::generator(2, g) * &x;
            assert!(apply(&mul, &x).unwrap().max_abs_diff(&expected) < 1e-15);
            let mut der = LinearOp::zero(4);
            der.push(ElemOp::der(g, 2), c(1.0, 0.0));
            assert!(apply(&der, &x).unwrap().max_abs_diff(&derive(&x, g)) < 1e-15);
        }
    }

    #[test]
    fn car_relations() {
        for i in 0..4u32 {
            for j in 0..4u32 {
                let mut a = LinearOp::zero(4);
                a.push(ElemOp::Der(i), c(1.0, 0.0));
                let mut b = LinearOp::zero(4);
                b.push(ElemOp::Mul(j), c(1.0, 0.0));
                let delta = if i == j { 1.0 } else { 0.0 };
                assert_eq!(anticommutator_defect(&a, &b, c(delta, 0.0)).unwrap(), 0.0);
                assert_eq!(anticommutator_defect(&a, &a, c(0.0, 0.0)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn adjoint_matches_dense_conjugate_transpose() {
        let mut q = QuadOp::zero(4);
        q.push(ElemOp::Mul(0), ElemOp::Der(3), c(0.5, 1.0));
        q.push(ElemOp::Mul(2), ElemOp::Mul(1), c(-0.25, 0.0));
        q.constant = c(0.0, 2.0);
        let dense = to_dense(&q).unwrap();
        let adj = to_dense(&q.adjoint()).unwrap();
        assert!(crate::linalg::max_abs_diff(&dense.adjoint(), &adj) == 0.0);
    }

    #[test]
    fn streamed_norms_match_dense_products() {
        let mut a = QuadOp::zero(4);
        a.push(ElemOp::Mul(0), ElemOp::Der(1), c(1.0, 0.5));
        a.push(ElemOp::Der(2), ElemOp::Mul(3), c(0.3, 0.0));
        let mut b = QuadOp::zero(4);
        b.push(ElemOp::Mul(1), ElemOp::Der(0), c(0.7, -0.1));
        b.push(ElemOp::Mul(2), ElemOp::Mul(3), c(0.2, 0.0));
        let da = to_dense(&a).unwrap();
        let db = to_dense(&b).unwrap();
        let dense = crate::linalg::frobenius(&(&da * &db - &db * &da - &da * c(0.5, 0.0)));
        let streamed = commutator_defect(&a, &b, &[(c(0.5, 0.0), &a)]).unwrap();
        assert!((dense - streamed).abs() < 1e-13);
        assert!((frobenius_norm(&a).unwrap() - crate::linalg::frobenius(&da)).abs() < 1e-13);
    }

    #[test]
    fn budget_is_enforced() {
        let big = QuadOp::zero(18);
        assert!(frobenius_norm(&big).is_err());
    }

    #[test]
    fn symbolic_commutator_matches_dense() {
        let mut rng = random::rng(17);
        let ops: Vec<ElemOp> = (0..6u32).flat_map(|b| [ElemOp::Mul(b), ElemOp::Der(b)]).collect();
        let random_quad = |rng: &mut rand_chacha::ChaCha8Rng| {
            use rand::Rng;
            let mut q = QuadOp::zero(6);
            for _ in 0..12 {
                let l = ops[rng.random_range(0..ops.len())];
                let r = ops[rng.random_range(0..ops.len())];
                q.push(l, r, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
            q.constant = c(rng.random_range(-1.0..1.0), 0.0);
            q
        };
        for _ in 0..5 {
            let a = random_quad(&mut rng);
            let b = random_quad(&mut rng);
            let da = to_dense(&a).unwrap();
            let db = to_dense(&b).unwrap();
            let dc = to_dense(&quad_commutator(&a, &b).unwrap()).unwrap();
            assert!(crate::linalg::max_abs_diff(&(&da * &db - &db * &da), &dc) < 1e-14);
        }
    }
}
