//! Pair creation by a switched uniform electric field.
//!
//! Each transverse momentum evolves independently. Along the field the
//! kinetic momentum is `P(t) = p_z + eA_z(t)` and the Dirac Hamiltonian
//! splits into two copies of the two-level problem
//! `h(t) = −P(t) σ₂ + ε⊥ σ₃` with `ε⊥ = √(m² + p⊥²)`. The negative-energy
//! in-state is propagated through the pulse and projected on the
//! positive-energy out-state, giving `|β|²`, which is compared with
//! `e^{−πξ}`, `ξ = ε⊥²/|eE|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirac::{eigenmodes, h_external, ExternalField, RampProfile, RampShape};
use crate::error::{Error, Result};
use crate::gaussian::kappa;
use crate::linalg::{self, c, CMatrix};
use crate::Complex64;

/// Largest tolerated deviation of the evolved state from unit norm.
pub const UNITARITY_TOL: f64 = 1e-9;
/// Edges of the tanh ramp are followed for this many `τ` before and after the window.
pub const RAMP_MARGIN: f64 = 10.0;

/// How the mode equation is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Two-level reduction along the field.
    #[default]
    Reduced,
    /// Full four-component Dirac equation in the Dirac representation.
    Full,
}

/// Quadrature settings for the persistence exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersistenceSettings {
    /// Space-time volume `VT`.
    #[serde(default = "one")]
    pub volume_time: f64,
    /// Gauss-Laguerre nodes for each term.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Upper limit on the number of series terms.
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    /// Relative size of the next term at which the series is stopped.
    #[serde(default = "default_series_tol")]
    pub series_tol: f64,
}

fn one() -> f64 {
    1.0
}
fn default_nodes() -> usize {
    64
}
fn default_max_terms() -> usize {
    400
}
fn default_series_tol() -> f64 {
    1e-12
}

impl Default for PersistenceSettings {
    fn default() -> Self {
        Self {
            volume_time: 1.0,
            nodes: default_nodes(),
            max_terms: default_max_terms(),
            series_tol: default_series_tol(),
        }
    }
}

/// A pair-creation computation over a grid of transverse momenta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchwingerJob {
    /// Fermion mass `m`.
    pub mass: f64,
    /// Field strength `eE`.
    pub e_field: f64,
    /// Transverse momenta `(p_x, p_y)`.
    pub p_perp: Vec<[f64; 2]>,
    /// Longitudinal momenta sampled for every transverse momentum.
    #[serde(default = "default_pz")]
    pub p_z: Vec<f64>,
    /// Field-on duration `T`; defaults to `40/√eE`.
    #[serde(default)]
    pub duration: Option<f64>,
    /// Ramp shape; defaults to a tanh ramp of width `5/√eE`.
    #[serde(default)]
    pub ramp: Option<RampShape>,
    /// Time step; defaults to 0.01.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Representation parameter `λ`.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub representation: Representation,
    #[serde(default)]
    pub persistence: PersistenceSettings,
}

fn default_pz() -> Vec<f64> {
    vec![-5.0, 0.0, 5.0]
}
fn default_dt() -> f64 {
    0.01
}
fn default_lambda() -> f64 {
    2.0
}

impl SchwingerJob {
    /// A job with every default filled in.
    pub fn new(mass: f64, e_field: f64, p_perp: Vec<[f64; 2]>) -> Self {
        Self {
            mass,
            e_field,
            p_perp,
            p_z: default_pz(),
            duration: None,
            ramp: None,
            dt: default_dt(),
            lambda: default_lambda(),
            representation: Representation::Reduced,
            persistence: PersistenceSettings::default(),
        }
    }

    /// Transverse momenta giving `ξ = 1, …, n` at `m = 1`-like settings:
    /// `p_x = √(ξ|eE| − m²)`, `p_y = 0`.
    pub fn xi_grid(mass: f64, e_field: f64, xis: &[f64]) -> Result<Vec<[f64; 2]>> {
        xis.iter()
            .map(|&xi| {
                let s = xi * e_field.abs() - mass * mass;
                if s < 0.0 {
                    Err(Error::InvalidParameter { name: "xi", reason: format!("ξ = {xi} is below m²/|eE|") })
                } else {
                    Ok([s.sqrt(), 0.0])
                }
            })
            .collect()
    }

    /// Field-on duration.
    pub fn duration(&self) -> f64 {
        self.duration.unwrap_or(40.0 / self.e_field.abs().sqrt())
    }

    /// Ramp profile centred on `t = 0`.
    pub fn ramp_profile(&self) -> RampProfile {
        let shape = self.ramp.unwrap_or(RampShape::SmoothTanh { width: 5.0 / self.e_field.abs().sqrt() });
        let half = 0.5 * self.duration();
        RampProfile { shape, t_on: -half, t_off: half }
    }

    /// The switched field.
    pub fn field(&self) -> ExternalField {
        ExternalField::ConstantE { e_e: self.e_field, ramp: self.ramp_profile() }
    }

    /// Checks every parameter guard.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be positive and finite, got {v}") })
            }
        };
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidParameter { name: "mass", reason: "must be non-negative".into() });
        }
        if self.e_field == 0.0 || !self.e_field.is_finite() {
            return Err(Error::InvalidParameter { name: "e_field", reason: "must be non-zero and finite".into() });
        }
        if let Some(t) = self.duration {
            positive("duration", t)?;
        }
        positive("dt", self.dt)?;
        crate::gaussian::check_lambda(self.lambda)?;
        if self.p_z.is_empty() {
            return Err(Error::InvalidParameter {
                name: "p_z",
                reason: "at least one longitudinal momentum is needed".into(),
            });
        }
        if self.p_perp.iter().flatten().chain(&self.p_z).any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter { name: "momenta", reason: "must be finite".into() });
        }
        positive("persistence.volume_time", self.persistence.volume_time)?;
        if self.persistence.nodes < 2 || self.persistence.max_terms == 0 {
            return Err(Error::InvalidParameter {
                name: "persistence", reason: "needs ≥ 2 nodes and ≥ 1 term".into()
            });
        }
        positive("persistence.series_tol", self.persistence.series_tol)?;
        self.field().validate()?;
        let ramp = self.ramp_profile();
        if ramp.tau() * 2.0 > self.duration() {
            return Err(Error::InvalidParameter {
                name: "ramp",
                reason: "ramp edges are wider than the window".into(),
            });
        }
        if self.dt > 0.1 * ramp.tau().max(self.duration()) {
            return Err(Error::InvalidParameter { name: "dt", reason: "step does not resolve the window".into() });
        }
        Ok(())
    }

    /// `(t_start, t_extract, t_check)`: start of the evolution, first and second extraction.
    pub fn timeline(&self) -> (f64, f64, f64) {
        let ramp = self.ramp_profile();
        let margin = match ramp.shape {
            RampShape::Sudden => 0.0,
            RampShape::SmoothTanh { .. } => RAMP_MARGIN * ramp.tau(),
        };
        let t1 = ramp.t_off + margin;
        (ramp.t_on - margin, t1, t1 + 0.25 * self.duration())
    }
}

/// `e^{−πξ}`.
pub fn analytic_beta_sq(xi: f64) -> f64 {
    (-std::f64::consts::PI * xi).exp()
}

/// `ξ = (p⊥² + m²)/|eE|`.
pub fn xi(p_perp: [f64; 2], mass: f64, e_field: f64) -> f64 {
    (p_perp[0] * p_perp[0] + p_perp[1] * p_perp[1] + mass * mass) / e_field.abs()
}

/// `|β|²` at one longitudinal momentum, with the stopping-rule data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub p_z: f64,
    /// `|β|²` at the first extraction time.
    pub beta_sq: f64,
    /// `|β|²` at the second extraction time.
    pub beta_sq_late: f64,
    /// `|α|²` at the first extraction time.
    pub alpha_sq: f64,
    /// `|‖ψ‖ − 1|` at the end of the evolution.
    pub unitarity_defect: f64,
}

impl Extraction {
    /// Relative change of `|β|²` between the two extraction times.
    pub fn drift(&self) -> f64 {
        if self.beta_sq == 0.0 {
            return if self.beta_sq_late == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.beta_sq_late - self.beta_sq).abs() / self.beta_sq
    }
}

/// Result for one transverse momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub p_x: f64,
    pub p_y: f64,
    pub xi: f64,
    /// Mean of `|β|²` over the sampled `p_z`.
    pub beta_sq_numeric: f64,
    /// `e^{−πξ}`.
    pub beta_sq_analytic: f64,
    /// `|numeric − analytic| / analytic`.
    pub rel_err: f64,
    /// Largest stopping-rule drift over the sampled `p_z`.
    pub drift: f64,
    /// Largest relative spread of `|β|²` across `p_z`.
    pub pz_spread: f64,
    /// Largest `| |α|² + |β|² − 1 |` over the samples.
    pub normal_defect: f64,
    pub samples: Vec<Extraction>,
}

type Spinor = [Complex64; 2];

/// `exp(−i h dt) ψ` for `h = a σ₁ + b σ₂ + z σ₃` written as `(hx, hy, hz)`.
#[inline]
fn step2(psi: Spinor, hy: f64, hz: f64, dt: f64) -> Spinor {
    let e = (hy * hy + hz * hz).sqrt();
    if e == 0.0 {
        return psi;
    }
    let (s, co) = (e * dt).sin_cos();
    let f = s / e;
    // h ψ with h = [[hz, −i hy], [i hy, −hz]].
    let h0 = psi[0] * hz + psi[1] * c(0.0, -hy);
    let h1 = psi[0] * c(0.0, hy) - psi[1] * hz;
    [psi[0] * co - c(0.0, f) * h0, psi[1] * co - c(0.0, f) * h1]
}

/// Eigenvector of `h = hy σ₂ + hz σ₃` with eigenvalue `sign·E`.
fn eigvec2(hy: f64, hz: f64, sign: f64) -> Spinor {
    let e = (hy * hy + hz * hz).sqrt();
    // (h − λ)v = 0 with λ = sign·E: v ∝ (−i hy, λ − hz) or (λ + hz, i hy).
    let lam = sign * e;
    let (a, b) = if (lam + hz).abs() >= (lam - hz).abs() {
        (c(lam + hz, 0.0), c(0.0, hy))
    } else {
        (c(0.0, -hy), c(lam - hz, 0.0))
    };
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}

fn inner2(a: &Spinor, b: &Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Two-level evolution through the pulse for kinetic momentum `p_z + eA_z(t)`.
pub fn evolve_reduced(
    eps_perp: f64,
    p_z: f64,
    field: &ExternalField,
    times: (f64, f64, f64),
    dt: f64,
) -> Result<Extraction> {
    let (t0, t1, t2) = times;
    let hy_at = |t: f64| -(p_z + field.ea_z(t));
    let mut psi = eigvec2(hy_at(t0), eps_perp, -1.0);
    let mut t = t0;
    let advance = |psi: &mut Spinor, t: &mut f64, until: f64| {
        let steps = ((until - *t) / dt).ceil().max(1.0) as usize;
        let h = (until - *t) / steps as f64;
        for _ in 0..steps {
            *psi = step2(*psi, hy_at(*t + 0.5 * h), eps_perp, h);
            *t += h;
        }
        *t = until;
    };
    let project = |psi: &Spinor, t: f64| {
        let up = eigvec2(hy_at(t), eps_perp, 1.0);
        let down = eigvec2(hy_at(t), eps_perp, -1.0);
        (inner2(&up, psi).norm_sqr(), inner2(&down, psi).norm_sqr())
    };
    advance(&mut psi, &mut t, t1);
    let (beta_sq, alpha_sq) = project(&psi, t1);
    advance(&mut psi, &mut t, t2);
    let (beta_sq_late, _) = project(&psi, t2);
    let unitarity_defect = (inner2(&psi, &psi).re.sqrt() - 1.0).abs();
    if unitarity_defect > UNITARITY_TOL {
        return Err(Error::Numerical { check: "mode unitarity", value: unitarity_defect, tolerance: UNITARITY_TOL });
    }
    Ok(Extraction { p_z, beta_sq, beta_sq_late, alpha_sq, unitarity_defect })
}

/// Four-component evolution; reports the mean eigenvalue of `β†β`.
pub fn evolve_full(
    p_perp: [f64; 2],
    p_z: f64,
    mass: f64,
    field: &ExternalField,
    times: (f64, f64, f64),
    dt: f64,
) -> Result<Extraction> {
    let (t0, t1, t2) = times;
    let h_at = |t: f64| h_external(&[p_perp[0], p_perp[1], p_z], mass, &[0.0, 0.0, field.ea_z(t)]);
    let initial = eigenmodes(&h_at(t0)?)?;
    let mut u = initial.negative_vectors();
    let mut t = t0;
    let advance = |u: &mut CMatrix, t: &mut f64, until: f64| -> Result<()> {
        let steps = ((until - *t) / dt).ceil().max(1.0) as usize;
        let h = (until - *t) / steps as f64;
        for _ in 0..steps {
            *u = linalg::expm_hermitian(&h_at(*t + 0.5 * h)?, h) * &*u;
            *t += h;
        }
        *t = until;
        Ok(())
    };
    let project = |u: &CMatrix, t: f64| -> Result<(f64, f64)> {
        let out = eigenmodes(&h_at(t)?)?;
        let beta = out.positive_vectors().adjoint() * u;
        let alpha = out.negative_vectors().adjoint() * u;
        let n = u.ncols() as f64;
        Ok(((beta.adjoint() * &beta).trace().re / n, (alpha.adjoint() * &alpha).trace().re / n))
    };
    advance(&mut u, &mut t, t1)?;
    let (beta_sq, alpha_sq) = project(&u, t1)?;
    advance(&mut u, &mut t, t2)?;
    let (beta_sq_late, _) = project(&u, t2)?;
    let unitarity_defect = linalg::max_abs_diff(&(u.adjoint() * &u), &linalg::identity(u.ncols()));
    if unitarity_defect > UNITARITY_TOL {
        return Err(Error::Numerical { check: "mode unitarity", value: unitarity_defect, tolerance: UNITARITY_TOL });
    }
    Ok(Extraction { p_z, beta_sq, beta_sq_late, alpha_sq, unitarity_defect })
}

/// Evolves one transverse momentum at every sampled `p_z`.
pub fn evolve_mode(p_perp: [f64; 2], job: &SchwingerJob) -> Result<ModeResult> {
    job.validate()?;
    let field = job.field();
    let times = job.timeline();
    let eps_perp = (p_perp[0] * p_perp[0] + p_perp[1] * p_perp[1] + job.mass * job.mass).sqrt();
    let samples = job
        .p_z
        .iter()
        .map(|&pz| match job.representation {
            Representation::Reduced => evolve_reduced(eps_perp, pz, &field, times, job.dt),
            Representation::Full => evolve_full(p_perp, pz, job.mass, &field, times, job.dt),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_mode(p_perp, job, samples))
}

fn summarize_mode(p_perp: [f64; 2], job: &SchwingerJob, samples: Vec<Extraction>) -> ModeResult {
    let x = xi(p_perp, job.mass, job.e_field);
    let analytic = analytic_beta_sq(x);
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.beta_sq).sum::<f64>() / n;
    let drift = samples.iter().map(Extraction::drift).fold(0.0, f64::max);
    let spread =
        if mean > 0.0 { samples.iter().map(|s| (s.beta_sq - mean).abs() / mean).fold(0.0, f64::max) } else { 0.0 };
    let normal_defect = samples.iter().map(|s| (s.alpha_sq + s.beta_sq - 1.0).abs()).fold(0.0, f64::max);
    ModeResult {
        p_x: p_perp[0],
        p_y: p_perp[1],
        xi: x,
        beta_sq_numeric: mean,
        beta_sq_analytic: analytic,
        rel_err: (mean - analytic).abs() / analytic,
        drift,
        pz_spread: spread,
        normal_defect,
        samples,
    }
}

/// Aggregate of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n_modes: usize,
    pub empty: bool,
    /// Largest relative error among modes with `1 ≤ ξ ≤ 6`.
    pub max_rel_err: f64,
    pub max_drift: f64,
    pub max_pz_spread: f64,
    /// Whether `|β|²` strictly decreases with `ξ` over the grid.
    pub monotone_in_xi: bool,
    /// Modes that failed, as `(index, message)`.
    pub failures: Vec<(usize, String)>,
}

/// Result of a sweep, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub modes: Vec<ModeResult>,
    pub summary: SweepSummary,
}

/// Evolves every transverse momentum of the job in parallel.
pub fn sweep(job: &SchwingerJob) -> Result<Sweep> {
    job.validate()?;
    let outcomes: Vec<Result<ModeResult>> = job.p_perp.par_iter().map(|&p| evolve_mode(p, job)).collect();
    let mut modes = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in outcomes.into_iter().enumerate() {
        match r {
            Ok(m) => modes.push(m),
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    let in_range = |m: &&ModeResult| (1.0 - 1e-9..=6.0 + 1e-9).contains(&m.xi);
    let max_rel_err = modes.iter().filter(in_range).map(|m| m.rel_err).fold(0.0, f64::max);
    let max_drift = modes.iter().map(|m| m.drift).fold(0.0, f64::max);
    let max_pz_spread = modes.iter().map(|m| m.pz_spread).fold(0.0, f64::max);
    let mut by_xi: Vec<&ModeResult> = modes.iter().collect();
    by_xi.sort_by(|a, b| a.xi.total_cmp(&b.xi));
    let monotone_in_xi = by_xi.windows(2).all(|w| w[1].xi == w[0].xi || w[1].beta_sq_numeric < w[0].beta_sq_numeric);
    let summary = SweepSummary {
        n_modes: modes.len(),
        empty: job.p_perp.is_empty(),
        max_rel_err,
        max_drift,
        max_pz_spread,
        monotone_in_xi,
        failures,
    };
    Ok(Sweep { modes, summary })
}

/// Gauss-Laguerre nodes and weights for `∫₀^∞ e^{−x} f(x) dx` (Golub-Welsch).
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "nodes", reason: "need at least one node".into() });
    }
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            jacobi[(i, i + 1)] = (i + 1) as f64;
            jacobi[(i + 1, i)] = (i + 1) as f64;
        }
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)] * eig.eigenvectors[(0, k)])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// One term `n` of the persistence series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceTerm {
    pub n: usize,
    /// Contribution to the exponent (negative).
    pub quadrature: f64,
    /// Difference against the half-node rule.
    pub error_estimate: f64,
    /// Closed-form value of the term when `κ = 1`.
    pub closed_form: Option<f64>,
}

/// Vacuum persistence `exp(exponent)` and its series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Persistence {
    pub lambda: f64,
    pub kappa: f64,
    pub exponent: f64,
    pub probability: f64,
    /// Sum of the per-term quadrature error estimates.
    pub quadrature_error: f64,
    /// Magnitude of the first omitted term.
    pub tail_estimate: f64,
    /// `−(2(eE)²VT/(2π)³) Σ e^{−nπm²/eE}/n²`, present when `κ = 1`.
    pub closed_form_exponent: Option<f64>,
    pub terms: Vec<PersistenceTerm>,
}

fn persistence_term(n: usize, kappa: f64, xi0: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    // ∫₀^∞ F(ξ₀+σ)ⁿ dσ with F = κq/(1+(κ−1)q), q = e^{−πξ}; the factor e^{−nπσ}
    // is taken as the Laguerre weight after scaling σ = x/(nπ).
    let scale = n as f64 * std::f64::consts::PI;
    let q0 = (-std::f64::consts::PI * xi0).exp();
    let mut sum = 0.0;
    for (x, w) in nodes.0.iter().zip(&nodes.1) {
        let q = q0 * (-x / n as f64).exp();
        sum += w * (1.0 + (kappa - 1.0) * q).powi(-(n as i32));
    }
    (kappa * q0).powi(n as i32) * sum / scale
}

/// Exponent of the vacuum persistence probability over the volume `VT`.
pub fn persistence_probability(job: &SchwingerJob) -> Result<Persistence> {
    job.validate()?;
    let k = kappa(job.lambda)?;
    let settings = job.persistence;
    let e = job.e_field.abs();
    let xi0 = job.mass * job.mass / e;
    let prefactor = -2.0 * e * settings.volume_time / (2.0 * std::f64::consts::PI).powi(3);
    // ∫dp_x dp_y G(ξ) = π|eE| ∫₀^∞ G(ξ₀ + σ) dσ.
    let radial = std::f64::consts::PI * e;
    let full = gauss_laguerre(settings.nodes)?;
    let half = gauss_laguerre((settings.nodes / 2).max(1))?;
    let unit_kappa = (k - 1.0).abs() < 1e-15;
    let mut terms = Vec::new();
    let mut exponent: f64 = 0.0;
    let mut quadrature_error = 0.0;
    let mut tail = f64::INFINITY;
    for n in 1..=settings.max_terms + 1 {
        let value = prefactor * radial * persistence_term(n, k, xi0, &full) / n as f64;
        if n > 1 && value.abs() < settings.series_tol * exponent.abs() {
            tail = value.abs();
            break;
        }
        if n == settings.max_terms + 1 {
            return Err(Error::Numerical {
                check: "persistence series tail",
                value: value.abs() / exponent.abs(),
                tolerance: settings.series_tol,
            });
        }
        let coarse = prefactor * radial * persistence_term(n, k, xi0, &half) / n as f64;
        let closed_form =
            unit_kappa.then(|| prefactor * e * (-(n as f64) * std::f64::consts::PI * xi0).exp() / (n * n) as f64);
        exponent += value;
        quadrature_error += (value - coarse).abs();
        terms.push(PersistenceTerm { n, quadrature: value, error_estimate: (value - coarse).abs(), closed_form });
        if value == 0.0 {
            tail = 0.0;
            break;
        }
    }
    let closed_form_exponent = unit_kappa.then(|| terms.iter().filter_map(|t| t.closed_form).sum());
    Ok(Persistence {
        lambda: job.lambda,
        kappa: k,
        exponent,
        probability: exponent.exp(),
        quadrature_error,
        tail_estimate: tail,
        closed_form_exponent,
        terms,
    })
}

/// `−(2(eE)²VT/(2π)³) Σ_{n≥1} e^{−nπm²/eE}/n²`, summed to convergence.
pub fn schwinger_closed_form(mass: f64, e_field: f64, volume_time: f64) -> f64 {
    let e = e_field.abs();
    let prefactor = -2.0 * e * e * volume_time / (2.0 * std::f64::consts::PI).powi(3);
    let q = (-std::f64::consts::PI * mass * mass / e).exp();
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 1..100_000u64 {
        power *= q;
        let term = power / (n * n) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    prefactor * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_step_is_unitary_and_exact() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let h = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.0, 0.4), c(0.0, -0.4), c(-0.7, 0.0)]);
        // h = −0.4 σ₂ + 0.7 σ₃.
        let out = step2(psi, -0.4, 0.7, 0.3);
        let exact = linalg::expm_hermitian(&h, 0.3) * nalgebra::DVector::from_vec(vec![psi[0], psi[1]]);
        assert!((out[0] - exact[0]).norm() < 1e-14 && (out[1] - exact[1]).norm() < 1e-14);
    }

    #[test]
    fn eigenvectors_are_eigenvectors() {
        for (hy, hz) in [(0.3, 1.0), (-2.0, 0.1), (5.0, -1.0), (0.0, 1.0)] {
            for sign in [-1.0, 1.0] {
                let v = eigvec2(hy, hz, sign);
                let e = sign * (hy * hy + hz * hz).sqrt();
                let h0 = v[0] * hz + v[1] * c(0.0, -hy);
                let h1 = v[0] * c(0.0, hy) - v[1] * hz;
                assert!((h0 - v[0] * e).norm() < 1e-14 && (h1 - v[1] * e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn laguerre_rule_integrates_polynomials() {
        let (x, w) = gauss_laguerre(10).unwrap();
        // ∫ e^{−x} x^k = k!
        for (k, fact) in [(0, 1.0), (1, 1.0), (3, 6.0), (7, 5040.0)] {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((s - fact).abs() < 1e-9 * fact, "k={k}: {s}");
        }
    }

    #[test]
    fn field_off_creates_nothing() {
        let times = (-10.0, 10.0, 15.0);
        let r = evolve_reduced(1.0, 0.5, &ExternalField::None, times, 0.01).unwrap();
        assert!(r.beta_sq < 1e-28);
        assert!((r.alpha_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn job_guards() {
        let mut job = SchwingerJob::new(1.0, 1.0, vec![[0.0, 0.0]]);
        assert!(job.validate().is_ok());
        job.e_field = 0.0;
        assert!(job.validate().is_err());
        job.e_field = 1.0;
        job.duration = Some(1.0);
        assert!(job.validate().is_err());
        job.duration = None;
        job.lambda = -1.0;
        assert!(job.validate().is_err());
        assert!(SchwingerJob::xi_grid(2.0, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn closed_form_series() {
        let v = schwinger_closed_form(1.0, 1.0, 1.0);
        let q = (-std::f64::consts::PI).exp();
        let direct: f64 = (1..60).map(|n| q.powi(n) / (n * n) as f64).sum();
        assert!((v + 2.0 / (2.0 * std::f64::consts::PI).powi(3) * direct).abs() < 1e-18);
    }
}
