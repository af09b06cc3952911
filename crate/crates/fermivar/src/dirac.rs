//! First-quantized Dirac Hamiltonians, spectral bases and external fields.
//!
//! Units are `ħ = c = 1`. Momentum-space Hamiltonians are
//! `h(p) = γ⁰γⁱ pᵢ + m γ⁰`; a momentum vector of length 1 selects the 1+1D
//! representation and a vector of length 3 the 3+1D Dirac representation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, dagger, hermitian_eigen, identity, kron, pauli, CMatrix};

/// Dirac matrices `γ⁰, γ¹, …` for a given spinor dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    /// Spinor dimension: 2 for 1+1D, 4 for 3+1D.
    pub dimension: usize,
    pub gamma0: CMatrix,
    /// Spatial matrices `γ¹ … γᵈ`.
    pub gamma_i: Vec<CMatrix>,
}

impl GammaSet {
    /// `γ⁰γⁱ` for every spatial direction (the `αᵢ` matrices).
    pub fn alphas(&self) -> Vec<CMatrix> {
        self.gamma_i.iter().map(|g| &self.gamma0 * g).collect()
    }

    /// `γ^μ` for `μ = 0 … d`.
    pub fn all(&self) -> Vec<CMatrix> {
        let mut v = vec![self.gamma0.clone()];
        v.extend(self.gamma_i.iter().cloned());
        v
    }
}

/// Builds `γ⁰ = σ₃, γ¹ = iσ₁` in two dimensions and the Dirac representation
/// `γ⁰ = diag(1, 1, -1, -1)`, `γⁱ = [[0, σᵢ], [-σᵢ, 0]]` in four.
pub fn build_gamma(dimension: usize) -> Result<GammaSet> {
    let [s1, s2, s3] = pauli();
    match dimension {
        2 => Ok(GammaSet { dimension, gamma0: s3.clone(), gamma_i: vec![s1 * c(0.0, 1.0)] }),
        4 => {
            let i2 = identity(2);
            let z2 = CMatrix::zeros(2, 2);
            let block = |a: &CMatrix, b: &CMatrix, cc: &CMatrix, d: &CMatrix| {
                let mut m = CMatrix::zeros(4, 4);
                m.view_mut((0, 0), (2, 2)).copy_from(a);
                m.view_mut((0, 2), (2, 2)).copy_from(b);
                m.view_mut((2, 0), (2, 2)).copy_from(cc);
                m.view_mut((2, 2), (2, 2)).copy_from(d);
                m
            };
            let gamma0 = block(&i2, &z2, &z2, &(-&i2));
            let gamma_i = [s1, s2, s3].iter().map(|s| block(&z2, s, &(-s), &z2)).collect();
            Ok(GammaSet { dimension, gamma0, gamma_i })
        }
        _ => Err(Error::InvalidParameter {
            name: "dimension",
            reason: format!("spinor dimension must be 2 or 4, got {dimension}"),
        }),
    }
}

fn gamma_for_momentum(p: &[f64]) -> Result<GammaSet> {
    match p.len() {
        1 => build_gamma(2),
        3 => build_gamma(4),
        n => {
            Err(Error::InvalidParameter { name: "p", reason: format!("momentum must have 1 or 3 components, got {n}") })
        }
    }
}

/// `h(p) = γ⁰γⁱ pᵢ + m γ⁰`.
pub fn h_momentum(p: &[f64], m: f64) -> Result<CMatrix> {
    if m < 0.0 || !m.is_finite() {
        return Err(Error::InvalidParameter { name: "m", reason: "mass must be finite and non-negative".into() });
    }
    let gamma = gamma_for_momentum(p)?;
    let mut h = &gamma.gamma0 * c(m, 0.0);
    for (alpha, &pi) in gamma.alphas().iter().zip(p) {
        h += alpha * c(pi, 0.0);
    }
    Ok(h)
}

/// Minimally coupled `h'(p) = h(p) + γ⁰γⁱ (eA)ᵢ`, i.e. `h(p + eA)`.
///
/// `ea` holds the products `e·Aᵢ` of the charge and the vector potential.
pub fn h_external(p: &[f64], m: f64, ea: &[f64]) -> Result<CMatrix> {
    if ea.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: ea.len() });
    }
    let shifted: Vec<f64> = p.iter().zip(ea).map(|(a, b)| a + b).collect();
    h_momentum(&shifted, m)
}

/// Label of one single-particle mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeLabel {
    /// Momentum of the block the mode belongs to, if the basis was built from one.
    pub momentum: Option<Vec<f64>>,
    /// Position of the mode inside its block.
    pub index: usize,
}

/// An orthonormal eigenbasis of a Hermitian single-particle Hamiltonian.
///
/// Modes are ordered with all positive energies first (ascending), followed by
/// the non-positive energies (ascending). Inside every degenerate eigenspace
/// the basis is obtained by Gram-Schmidt of the projected canonical vectors in
/// index order, so it does not depend on the eigen-solver's internal choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    pub h: CMatrix,
    pub energies: Vec<f64>,
    /// Column `n` is the eigenvector `ψₙ`.
    pub vectors: CMatrix,
    pub p_plus: CMatrix,
    pub p_minus: CMatrix,
    pub labels: Vec<ModeLabel>,
    /// Modes with `|E| ≤` the zero tolerance; they are counted in `P₋`.
    pub zero_modes: Vec<usize>,
}

impl ModeBasis {
    /// Single-particle dimension `d`.
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Number of strictly positive energies.
    pub fn n_positive(&self) -> usize {
        self.energies.iter().filter(|&&e| e > 0.0).count()
    }

    /// Eigenvectors of the positive-energy modes as columns.
    pub fn positive_vectors(&self) -> CMatrix {
        let np = self.n_positive();
        self.vectors.columns(0, np).into_owned()
    }

    /// Eigenvectors of the remaining (negative or zero) modes as columns.
    pub fn negative_vectors(&self) -> CMatrix {
        let np = self.n_positive();
        self.vectors.columns(np, self.dim() - np).into_owned()
    }
}

/// Deterministic orthonormal eigenbasis and spectral projectors of `h`.
pub fn eigenmodes(h: &CMatrix) -> Result<ModeBasis> {
    crate::linalg::ensure_hermitian(h, 1e-10)?;
    let d = h.nrows();
    let (values, raw) = hermitian_eigen(h);
    let scale = values.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    let cluster_tol = 1e-9 * scale;
    let zero_tol = 1e-12 * scale;

    // Group numerically degenerate eigenvalues and rebuild each eigenspace.
    let mut energies = Vec::with_capacity(d);
    let mut columns: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[end] - values[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let k = end - start;
        let block = raw.columns(start, k);
        let projector = block * block.adjoint();
        let mean = values[start..end].iter().sum::<f64>() / k as f64;
        let threshold = 0.5 / (d as f64).sqrt();
        let mut accepted: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(k);
        for j in 0..d {
            if accepted.len() == k {
                break;
            }
            let mut w = projector.column(j).into_owned();
            for q in &accepted {
                let overlap = q.dotc(&w);
                w -= q * overlap;
            }
            let norm = w.norm();
            if norm > threshold {
                accepted.push(w / c(norm, 0.0));
            }
        }
        debug_assert_eq!(accepted.len(), k);
        for q in accepted {
            energies.push(mean);
            columns.push(q);
        }
        start = end;
    }

    // Positive energies first, then the rest, each ascending.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        let pa = energies[a] > zero_tol;
        let pb = energies[b] > zero_tol;
        pb.cmp(&pa).then(energies[a].total_cmp(&energies[b]))
    });
    let mut vectors = CMatrix::zeros(d, d);
    let mut sorted_energies = Vec::with_capacity(d);
    let mut zero_modes = Vec::new();
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &columns[k]);
        let e = energies[k];
        if e.abs() <= zero_tol {
            zero_modes.push(col);
            sorted_energies.push(0.0);
        } else {
            sorted_energies.push(e);
        }
    }
    let mut p_plus = CMatrix::zeros(d, d);
    let mut p_minus = CMatrix::zeros(d, d);
    for (n, &e) in sorted_energies.iter().enumerate() {
        let v = vectors.column(n);
        let proj = v * v.adjoint();
        if e > 0.0 {
            p_plus += proj;
        } else {
            p_minus += proj;
        }
    }
    let labels = (0..d).map(|index| ModeLabel { momentum: None, index }).collect();
    Ok(ModeBasis { h: h.clone(), energies: sorted_energies, vectors, p_plus, p_minus, labels, zero_modes })
}

/// Eigenbasis of `h(p)` with every mode labelled by `p`.
pub fn momentum_modes(p: &[f64], m: f64) -> Result<ModeBasis> {
    let mut basis = eigenmodes(&h_momentum(p, m)?)?;
    for label in &mut basis.labels {
        label.momentum = Some(p.to_vec());
    }
    Ok(basis)
}

/// Lattice discretization of the spatial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Symmetric nearest-neighbour difference.
    Naive,
    /// Exact lattice dispersion `D = F† diag(ik) F` with the Nyquist mode removed.
    Slac,
}

/// A periodic 1+1D lattice Dirac Hamiltonian and its companion operators.
///
/// The single-particle index is `site * 2 + spinor`.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub n_sites: usize,
    pub mass: f64,
    pub spacing: f64,
    pub scheme: Scheme,
    /// Real antisymmetric derivative matrix on sites.
    pub derivative: CMatrix,
    /// Single-particle momentum `p = -i D ⊗ 1₂`.
    pub momentum: CMatrix,
    /// Centered position `X = (x - (N-1)/2) a ⊗ 1₂`.
    pub position: CMatrix,
    /// `h = p ⊗ γ⁰γ¹ + m 1 ⊗ γ⁰`.
    pub h: CMatrix,
}

impl Lattice {
    /// Single-particle dimension `2 N`.
    pub fn dim(&self) -> usize {
        2 * self.n_sites
    }

    /// Lattice momenta `2π n / (N a)` in the symmetric Brillouin zone, in the
    /// order `n = 0, 1, …, N-1` of the discrete Fourier transform.
    pub fn momenta(&self) -> Vec<f64> {
        lattice_momenta(self.n_sites, self.spacing)
    }

    /// Unitary discrete Fourier transform on sites, `F_kx = e^{-i k x a}/√N`.
    pub fn fourier(&self) -> CMatrix {
        let n = self.n_sites;
        let ks = self.momenta();
        CMatrix::from_fn(n, n, |k, x| Complex64::from_polar(1.0 / (n as f64).sqrt(), -ks[k] * x as f64 * self.spacing))
    }

    /// Symmetrized position-weighted kernel `½{X, h}`.
    pub fn boost_kernel(&self) -> CMatrix {
        (&self.position * &self.h + &self.h * &self.position) * c(0.5, 0.0)
    }
}

fn lattice_momenta(n: usize, a: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let signed = if 2 * j > n { j as f64 - n as f64 } else { j as f64 };
            2.0 * std::f64::consts::PI * signed / (n as f64 * a)
        })
        .collect()
}

/// Builds the periodic lattice Hamiltonian with `n_sites ≥ 2` sites.
pub fn lattice_h_1p1(n_sites: usize, m: f64, spacing: f64, scheme: Scheme) -> Result<Lattice> {
    if n_sites < 2 {
        return Err(Error::InvalidParameter { name: "n_sites", reason: "at least two sites are required".into() });
    }
    if spacing <= 0.0 || !spacing.is_finite() {
        return Err(Error::InvalidParameter { name: "spacing", reason: "spacing must be positive".into() });
    }
    if m < 0.0 || !m.is_finite() {
        return Err(Error::InvalidParameter { name: "m", reason: "mass must be finite and non-negative".into() });
    }
    let n = n_sites;
    let derivative = match scheme {
        Scheme::Naive => CMatrix::from_fn(n, n, |x, y| {
            let mut v = 0.0;
            if y == (x + 1) % n {
                v += 1.0;
            }
            if y == (x + n - 1) % n {
                v -= 1.0;
            }
            c(v / (2.0 * spacing), 0.0)
        }),
        Scheme::Slac => {
            let ks = lattice_momenta(n, spacing);
            CMatrix::from_fn(n, n, |x, y| {
                let r = (x as f64 - y as f64) * spacing;
                let mut v = 0.0;
                for (j, &k) in ks.iter().enumerate() {
                    // The Nyquist mode of an even lattice has no antisymmetric partner.
                    if n % 2 == 0 && j == n / 2 {
                        continue;
                    }
                    v -= k * (k * r).sin();
                }
                c(v / n as f64, 0.0)
            })
        }
    };
    let momentum = kron(&(&derivative * c(0.0, -1.0)), &identity(2));
    let gamma = build_gamma(2)?;
    let alpha = &gamma.gamma0 * &gamma.gamma_i[0];
    let p_sites = &derivative * c(0.0, -1.0);
    let h = kron(&p_sites, &alpha) + kron(&identity(n), &gamma.gamma0) * c(m, 0.0);
    let center = (n as f64 - 1.0) / 2.0;
    let x_sites =
        CMatrix::from_fn(n, n, |i, j| if i == j { c((i as f64 - center) * spacing, 0.0) } else { c(0.0, 0.0) });
    let position = kron(&x_sites, &identity(2));
    Ok(Lattice { n_sites, mass: m, spacing, scheme, derivative, momentum, position, h })
}

/// Two-flavour minimal coupling to an SU(2) field,
/// `H = 1_flavour ⊗ h + (g/2) Σᵢ (τ·Wⁱ) ⊗ γ⁰γⁱ`.
///
/// `w[i]` holds the isotriplet `(W¹, W², W³)` of the contravariant spatial
/// component `i`; the flavour index is the outer tensor factor.
pub fn su2_minimal_coupling(h_block: &CMatrix, gamma: &GammaSet, g: f64, w: &[[f64; 3]]) -> Result<CMatrix> {
    let d = gamma.dimension;
    if h_block.nrows() != d || h_block.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h_block.nrows() });
    }
    let alphas = gamma.alphas();
    if w.len() != alphas.len() {
        return Err(Error::DimensionMismatch { expected: alphas.len(), found: w.len() });
    }
    let tau = pauli();
    let mut out = kron(&identity(2), h_block);
    for (alpha, wi) in alphas.iter().zip(w) {
        let mut flavour = CMatrix::zeros(2, 2);
        for (t, &wa) in tau.iter().zip(wi) {
            flavour += t * c(wa, 0.0);
        }
        out += kron(&flavour, alpha) * c(0.5 * g, 0.0);
    }
    Ok(out)
}

/// Time profile of a uniform electric field that is switched on and off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum RampShape {
    /// Step functions at `t_on` and `t_off`.
    Sudden,
    /// `½[tanh((t - t_on)/τ) - tanh((t - t_off)/τ)]` with `τ = width/4`, so the
    /// field rises from 2% to 98% of its plateau over `width`.
    SmoothTanh { width: f64 },
}

/// Window and shape of a switched field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampProfile {
    pub shape: RampShape,
    pub t_on: f64,
    pub t_off: f64,
}

impl RampProfile {
    /// Validates the window ordering and the ramp width.
    pub fn validate(&self) -> Result<()> {
        // Written out so that NaN endpoints are rejected too.
        if self.t_on.partial_cmp(&self.t_off) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter { name: "ramp", reason: "t_on must precede t_off".into() });
        }
        if let RampShape::SmoothTanh { width } = self.shape {
            if width <= 0.0 || !width.is_finite() {
                return Err(Error::InvalidParameter { name: "ramp.width", reason: "width must be positive".into() });
            }
        }
        Ok(())
    }

    /// Time scale `τ` of the tanh edges (zero for sudden switching).
    pub fn tau(&self) -> f64 {
        match self.shape {
            RampShape::Sudden => 0.0,
            RampShape::SmoothTanh { width } => width / 4.0,
        }
    }

    /// Envelope `W(t) ∈ [0, 1]` multiplying the plateau field.
    pub fn envelope(&self, t: f64) -> f64 {
        match self.shape {
            RampShape::Sudden => {
                if t >= self.t_on && t <= self.t_off {
                    1.0
                } else {
                    0.0
                }
            }
            RampShape::SmoothTanh { .. } => {
                let tau = self.tau();
                0.5 * (((t - self.t_on) / tau).tanh() - ((t - self.t_off) / tau).tanh())
            }
        }
    }

    /// `∫ W dt`, normalized so that it equals `t` in the middle of the plateau
    /// of a window symmetric about zero.
    pub fn envelope_integral(&self, t: f64) -> f64 {
        match self.shape {
            RampShape::Sudden => {
                let mid = 0.5 * (self.t_on + self.t_off);
                t.clamp(self.t_on, self.t_off) - mid
            }
            RampShape::SmoothTanh { .. } => {
                let tau = self.tau();
                0.5 * tau * (ln_cosh((t - self.t_on) / tau) - ln_cosh((t - self.t_off) / tau))
            }
        }
    }

    /// Time after which the field is off to within `e^{-2·margin}` relative
    /// to its plateau.
    pub fn settled_after(&self, margin: f64) -> f64 {
        self.t_off + margin * self.tau()
    }

    /// Time before which the field is off to within `e^{-2·margin}`.
    pub fn quiet_before(&self, margin: f64) -> f64 {
        self.t_on - margin * self.tau()
    }
}

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// External field acting on the Dirac modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalField {
    None,
    /// Uniform field along `z` of strength `eE`, switched by the ramp.
    ConstantE {
        e_e: f64,
        ramp: RampProfile,
    },
    /// Time-independent `e·A` per spatial direction.
    StaticVectorPotential {
        ea: Vec<f64>,
    },
}

impl ExternalField {
    /// Validates the invariants of the field description.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExternalField::None => Ok(()),
            ExternalField::ConstantE { e_e, ramp } => {
                if *e_e == 0.0 || !e_e.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "eE",
                        reason: "field strength must be non-zero".into(),
                    });
                }
                ramp.validate()
            }
            ExternalField::StaticVectorPotential { ea } => {
                if ea.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { name: "ea", reason: "vector potential must be finite".into() })
                }
            }
        }
    }

    /// `e A_z(t)` for a field along `z`: `-eE ∫ W dt`.
    pub fn ea_z(&self, t: f64) -> f64 {
        match self {
            ExternalField::None => 0.0,
            ExternalField::ConstantE { e_e, ramp } => -e_e * ramp.envelope_integral(t),
            ExternalField::StaticVectorPotential { ea } => ea.last().copied().unwrap_or(0.0),
        }
    }
}

/// Checks `Σ ψₙ ψₙ† = 1` and `ψₙ† ψₘ = δₙₘ`, returning the worst deviation.
pub fn completeness_defect(basis: &ModeBasis) -> f64 {
    let d = basis.dim();
    let v = &basis.vectors;
    let a = crate::linalg::max_abs_diff(&(v * dagger(v)), &identity(d));
    let b = crate::linalg::max_abs_diff(&(dagger(v) * v), &identity(d));
    a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{anticommutator, frobenius, max_abs_diff};

    #[test]
    fn clifford_relations() {
        for dim in [2, 4] {
            let g = build_gamma(dim).unwrap();
            let all = g.all();
            for (mu, a) in all.iter().enumerate() {
                for (nu, b) in all.iter().enumerate() {
                    let eta = if mu != nu {
                        0.0
                    } else if mu == 0 {
                        2.0
                    } else {
                        -2.0
                    };
                    let expected = identity(dim) * c(eta, 0.0);
                    assert!(max_abs_diff(&anticommutator(a, b), &expected) < 1e-15);
                }
            }
            assert!(max_abs_diff(&g.gamma0, &g.gamma0.adjoint()) == 0.0);
            for gi in &g.gamma_i {
                assert!(max_abs_diff(gi, &(-gi.adjoint())) == 0.0);
            }
        }
        assert!(build_gamma(3).is_err());
    }

    #[test]
    fn two_dimensional_alpha_is_traceless_hermitian() {
        let g = build_gamma(2).unwrap();
        let a = &g.gamma0 * &g.gamma_i[0];
        assert_eq!(a.trace(), c(0.0, 0.0));
        assert_eq!(a, a.adjoint());
    }

    #[test]
    fn rest_frame_spectrum() {
        let b = momentum_modes(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.energies, vec![1.0, 1.0, -1.0, -1.0]);
        let expected = CMatrix::from_fn(4, 4, |i, j| if i == j && i < 2 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(max_abs_diff(&b.p_plus, &expected) < 1e-15);
    }

    #[test]
    fn massless_spectrum() {
        let b = momentum_modes(&[0.0, 0.0, 1.0], 0.0).unwrap();
        for e in b.energies {
            assert!((e.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_modes_join_the_negative_projector() {
        let b = momentum_modes(&[0.0], 0.0).unwrap();
        assert_eq!(b.zero_modes, vec![0, 1]);
        assert!(max_abs_diff(&b.p_minus, &identity(2)) < 1e-15);
    }

    #[test]
    fn vector_potential_shifts_momentum() {
        let h = h_external(&[0.3, 0.0, 0.5], 1.0, &[0.0, 0.0, 0.25]).unwrap();
        let b = eigenmodes(&h).unwrap();
        let e = (0.3f64.powi(2) + 0.75f64.powi(2) + 1.0).sqrt();
        assert!((b.energies[0] - e).abs() < 1e-14);
        assert_eq!(h_external(&[0.3], 1.0, &[0.0]).unwrap(), h_momentum(&[0.3], 1.0).unwrap());
    }

    #[test]
    fn lattice_is_hermitian_and_traceless() {
        for scheme in [Scheme::Naive, Scheme::Slac] {
            for n in 2..7 {
                let l = lattice_h_1p1(n, 0.7, 0.5, scheme).unwrap();
                assert!(frobenius(&(&l.h - l.h.adjoint())) < 1e-14);
                assert!(l.h.trace().norm() < 1e-14);
                assert!(frobenius(&(&l.derivative + l.derivative.transpose())) < 1e-14);
            }
        }
    }

    #[test]
    fn naive_massless_spectrum_is_symmetric() {
        let l = lattice_h_1p1(4, 0.0, 1.0, Scheme::Naive).unwrap();
        let mut e = eigenmodes(&l.h).unwrap().energies;
        e.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(e.iter().rev()) {
            assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn slac_dispersion_is_exact() {
        let l = lattice_h_1p1(5, 0.0, 1.0, Scheme::Slac).unwrap();
        let mut e: Vec<f64> = eigenmodes(&l.h).unwrap().energies.iter().map(|x| x.abs()).collect();
        e.sort_by(f64::total_cmp);
        let mut expected: Vec<f64> = l.momenta().iter().flat_map(|k| [k.abs(), k.abs()]).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_block_diagonalizes() {
        let l = lattice_h_1p1(4, 0.8, 1.0, Scheme::Slac).unwrap();
        let f = kron(&l.fourier(), &identity(2));
        let hk = &f * &l.h * f.adjoint();
        for i in 0..8 {
            for j in 0..8 {
                if i / 2 != j / 2 {
                    assert!(hk[(i, j)].norm() < 1e-13);
                }
            }
        }
        let pk = &f * &l.momentum * f.adjoint();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert!(pk[(i, j)].norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn two_site_lattice_has_no_momentum() {
        for scheme in [Scheme::Naive, Scheme::Slac] {
            let l = lattice_h_1p1(2, 1.0, 1.0, scheme).unwrap();
            assert!(frobenius(&l.derivative) < 1e-15);
        }
    }

    #[test]
    fn su2_coupling_properties() {
        let g2 = build_gamma(4).unwrap();
        let h = h_momentum(&[0.1, 0.2, 0.3], 1.0).unwrap();
        let zero = [[0.0; 3]; 3];
        let free = su2_minimal_coupling(&h, &g2, 0.7, &zero).unwrap();
        assert_eq!(free, kron(&identity(2), &h));
        let w = [[0.3, -0.2, 0.1], [0.0, 0.5, 0.4], [-0.6, 0.2, 0.0]];
        let neg_w: Vec<[f64; 3]> = w.iter().map(|v| [-v[0], -v[1], -v[2]]).collect();
        let a = su2_minimal_coupling(&h, &g2, -0.7, &w).unwrap();
        let b = su2_minimal_coupling(&h, &g2, 0.7, &neg_w).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-15);
        assert!(max_abs_diff(&a, &a.adjoint()) < 1e-15);
        assert!(su2_minimal_coupling(&h, &g2, 0.7, &w[..2]).is_err());
    }

    #[test]
    fn ramp_potential_is_linear_on_the_plateau() {
        let ramp = RampProfile { shape: RampShape::SmoothTanh { width: 5.0 }, t_on: -20.0, t_off: 20.0 };
        assert!((ramp.envelope_integral(3.0) - 3.0).abs() < 1e-12);
        assert!((ramp.envelope(0.0) - 1.0).abs() < 1e-12);
        let sudden = RampProfile { shape: RampShape::Sudden, t_on: -1.0, t_off: 1.0 };
        assert_eq!(sudden.envelope_integral(5.0), 1.0);
        assert!(RampProfile { shape: RampShape::SmoothTanh { width: 0.0 }, t_on: 0.0, t_off: 1.0 }.validate().is_err());
        assert!(RampProfile { shape: RampShape::Sudden, t_on: 1.0, t_off: 0.0 }.validate().is_err());
    }

    #[test]
    fn ln_cosh_is_stable() {
        assert!((ln_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-9);
    }
}
