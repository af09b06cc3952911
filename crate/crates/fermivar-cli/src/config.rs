//! Experiment configuration files.
//!
//! A configuration is a TOML document with four top-level keys and one
//! optional table:
//!
//! ```toml
//! experiment = "schwinger"          # required, one of the experiment names
//! seed = 7                          # required, unsigned integer
//! output_dir = "results/schwinger"  # optional
//! threads = 1                       # optional cap on worker threads
//!
//! [parameters]                      # optional, every key has a default
//! xi = [1.0, 2.0, 3.0]
//! ramp = { shape = "smooth_tanh", width = 5.0 }
//! ```
//!
//! Unknown keys are rejected at every level. The accepted parameter keys of
//! each experiment are the fields of the corresponding `*Params` struct.

use std::fmt;
use std::path::{Path, PathBuf};

use fermivar::dirac::{RampShape, Scheme};
use fermivar::gaussian::{self, Integrator};
use fermivar::schwinger::{PersistenceSettings, Representation, SchwingerJob};
use fermivar::{interaction, poincare};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reasons a configuration is rejected before anything runs.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("command line names `{cli}` but the configuration is for `{file}`")]
    Mismatch { cli: ExperimentKind, file: ExperimentKind },
    #[error("rejected by the {experiment} module: {source}")]
    Module { experiment: ExperimentKind, source: fermivar::Error },
}

/// The experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Grassmann oracle suite.
    Selftest,
    /// Fluctuation moments and the Tsallis identity.
    Fluctuation,
    /// Fock-space operator identities and the vacuum energy.
    Vacuum,
    /// Covariance propagation, overlaps and creation probabilities.
    Evolve,
    /// Pair creation in a switched field and vacuum persistence.
    Schwinger,
    /// Lattice Poincaré relations.
    Poincare,
    /// Nonlinear self-interaction sector.
    Interaction,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::Selftest,
        Self::Fluctuation,
        Self::Vacuum,
        Self::Evolve,
        Self::Schwinger,
        Self::Poincare,
        Self::Interaction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Selftest => "selftest",
            Self::Fluctuation => "fluctuation",
            Self::Vacuum => "vacuum",
            Self::Evolve => "evolve",
            Self::Schwinger => "schwinger",
            Self::Poincare => "poincare",
            Self::Interaction => "interaction",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {value}")))
    }
}

fn tolerance(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be non-negative and finite, got {value}")))
    }
}

fn count(field: &'static str, value: usize, min: usize, max: usize) -> Result<(), ConfigError> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in {min}..={max}, got {value}")))
    }
}

fn non_empty<T>(field: &'static str, values: &[T]) -> Result<(), ConfigError> {
    if values.is_empty() {
        Err(invalid(field, "must not be empty"))
    } else {
        Ok(())
    }
}

fn module(experiment: ExperimentKind) -> impl Fn(fermivar::Error) -> ConfigError {
    move |source| ConfigError::Module { experiment, source }
}

/// Grassmann oracle suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestParams {
    /// Random matrices for the Gaussian-integral determinant check.
    pub gaussian_cases: usize,
    /// Matrix sizes cycle through `1..=max_modes`.
    pub max_modes: usize,
    /// Random covariances per size for the norm identity.
    pub norm_cases: usize,
    pub max_norm_modes: usize,
    /// Random elements for each algebraic property.
    pub property_cases: usize,
    pub property_modes: usize,
    /// Largest admissible absolute error of every check.
    pub tolerance: f64,
}

impl Default for SelftestParams {
    fn default() -> Self {
        Self {
            gaussian_cases: 200,
            max_modes: 4,
            norm_cases: 10,
            max_norm_modes: 3,
            property_cases: 50,
            property_modes: 2,
            tolerance: 1e-12,
        }
    }
}

impl SelftestParams {
    fn validate(&self) -> Result<(), ConfigError> {
        count("gaussian_cases", self.gaussian_cases, 1, 100_000)?;
        count("max_modes", self.max_modes, 1, 6)?;
        count("norm_cases", self.norm_cases, 1, 10_000)?;
        count("max_norm_modes", self.max_norm_modes, 1, 4)?;
        count("property_cases", self.property_cases, 1, 10_000)?;
        count("property_modes", self.property_modes, 1, 3)?;
        tolerance("tolerance", self.tolerance)
    }
}

/// Fluctuation moments and the Tsallis identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluctuationParams {
    /// Mode counts at which the moments are checked against Berezin integrals.
    pub modes: Vec<usize>,
    /// Time steps `Δt` of the moment check.
    pub dt: Vec<f64>,
    /// Largest step of the Richardson sequence `Δt, Δt/2, …`.
    pub richardson_dt: f64,
    pub richardson_levels: usize,
    /// Orders `α` of the Tsallis divergence.
    pub tsallis_alpha: Vec<f64>,
    /// Random densities per order.
    pub tsallis_cases: usize,
    pub tsallis_modes: usize,
    pub tsallis_dt: f64,
    pub moment_tolerance: f64,
    pub slope_tolerance: f64,
    pub tsallis_tolerance: f64,
}

impl Default for FluctuationParams {
    fn default() -> Self {
        Self {
            modes: vec![1, 2],
            dt: vec![0.01, 0.1, 0.5],
            richardson_dt: 0.1,
            richardson_levels: 4,
            tsallis_alpha: vec![0.25, 0.5, 1.0, 2.0],
            tsallis_cases: 20,
            tsallis_modes: 1,
            tsallis_dt: 0.05,
            moment_tolerance: 1e-12,
            slope_tolerance: 1e-6,
            tsallis_tolerance: 1e-8,
        }
    }
}

impl FluctuationParams {
    fn validate(&self) -> Result<(), ConfigError> {
        non_empty("modes", &self.modes)?;
        for &d in &self.modes {
            count("modes", d, 1, gaussian::MAX_ORACLE_MODES)?;
        }
        non_empty("dt", &self.dt)?;
        for &dt in &self.dt {
            positive("dt", dt)?;
        }
        positive("richardson_dt", self.richardson_dt)?;
        count("richardson_levels", self.richardson_levels, 2, 8)?;
        for &a in &self.tsallis_alpha {
            positive("tsallis_alpha", a)?;
        }
        count("tsallis_cases", self.tsallis_cases, 0, 10_000)?;
        count("tsallis_modes", self.tsallis_modes, 1, gaussian::MAX_TSALLIS_MODES)?;
        positive("tsallis_dt", self.tsallis_dt)?;
        tolerance("moment_tolerance", self.moment_tolerance)?;
        tolerance("slope_tolerance", self.slope_tolerance)?;
        tolerance("tsallis_tolerance", self.tsallis_tolerance)
    }
}

/// Fock-space identities on 1+1D lattices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VacuumParams {
    pub sites: Vec<usize>,
    pub mass: f64,
    pub spacing: f64,
    pub scheme: Scheme,
    pub lambda: f64,
    /// Largest admissible normalized defect of every identity.
    pub tolerance: f64,
}

impl Default for VacuumParams {
    fn default() -> Self {
        Self { sites: vec![2, 3, 4], mass: 1.0, spacing: 1.0, scheme: Scheme::Slac, lambda: 2.0, tolerance: 1e-12 }
    }
}

impl VacuumParams {
    fn validate(&self) -> Result<(), ConfigError> {
        non_empty("sites", &self.sites)?;
        for &n in &self.sites {
            count("sites", n, 2, gaussian::MAX_FOCK_DIM / 2)?;
        }
        tolerance("mass", self.mass)?;
        positive("spacing", self.spacing)?;
        gaussian::check_lambda(self.lambda).map_err(module(ExperimentKind::Vacuum))?;
        tolerance("tolerance", self.tolerance)
    }
}

/// Covariance propagation, overlaps and creation probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveParams {
    /// Single-particle dimension of the randomized Hamiltonians.
    pub dim: usize,
    /// Independent randomized runs.
    pub runs: usize,
    pub lambda: f64,
    pub t_final: f64,
    /// Integrator steps over `[0, t_final]`.
    pub steps: usize,
    pub integrator: Integrator,
    /// Amplitude, centre and width of the Gaussian pulse added to `h₀`.
    pub pulse_strength: f64,
    pub pulse_center: f64,
    pub pulse_width: f64,
    /// Times at which the Riccati equation is checked.
    pub probe_times: Vec<f64>,
    /// Half-width of the central difference for `dΩ/dt`.
    pub fd_step: f64,
    pub residual_tolerance: f64,
    pub isometry_tolerance: f64,
    /// Random Gaussian pairs for the overlap check.
    pub overlap_pairs: usize,
    pub overlap_max_modes: usize,
    pub overlap_tolerance: f64,
    /// Random `β` blocks for the creation-probability check.
    pub kappa_cases: usize,
    pub kappa_max_modes: usize,
    /// Upper bound on the spectral norm of the random `β`.
    pub kappa_beta_norm: f64,
    pub kappa_tolerance: f64,
}

impl Default for EvolveParams {
    fn default() -> Self {
        Self {
            dim: 4,
            runs: 5,
            lambda: 2.0,
            t_final: 2.0,
            steps: 4000,
            integrator: Integrator::Rk4,
            pulse_strength: 0.6,
            pulse_center: 1.0,
            pulse_width: 0.8,
            probe_times: vec![0.7, 1.3],
            fd_step: 1e-4,
            residual_tolerance: 1e-6,
            isometry_tolerance: 1e-10,
            overlap_pairs: 50,
            overlap_max_modes: 3,
            overlap_tolerance: 1e-10,
            kappa_cases: 50,
            kappa_max_modes: 3,
            kappa_beta_norm: 0.9,
            kappa_tolerance: 1e-12,
        }
    }
}

impl EvolveParams {
    fn validate(&self) -> Result<(), ConfigError> {
        count("dim", self.dim, 2, 16)?;
        if self.dim % 2 != 0 {
            return Err(invalid("dim", "must be even so both energy signs are present"));
        }
        count("runs", self.runs, 0, 1000)?;
        gaussian::check_lambda(self.lambda).map_err(module(ExperimentKind::Evolve))?;
        positive("t_final", self.t_final)?;
        count("steps", self.steps, 1, 10_000_000)?;
        tolerance("pulse_strength", self.pulse_strength)?;
        if !self.pulse_center.is_finite() {
            return Err(invalid("pulse_center", "must be finite"));
        }
        positive("pulse_width", self.pulse_width)?;
        positive("fd_step", self.fd_step)?;
        for &t in &self.probe_times {
            if !(t - self.fd_step > 0.0 && t + self.fd_step <= self.t_final) {
                return Err(invalid("probe_times", format!("{t} ± fd_step must lie inside (0, t_final]")));
            }
        }
        let mut sorted = self.probe_times.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted != self.probe_times {
            return Err(invalid("probe_times", "must be increasing"));
        }
        tolerance("residual_tolerance", self.residual_tolerance)?;
        tolerance("isometry_tolerance", self.isometry_tolerance)?;
        count("overlap_pairs", self.overlap_pairs, 0, 100_000)?;
        count("overlap_max_modes", self.overlap_max_modes, 1, 4)?;
        tolerance("overlap_tolerance", self.overlap_tolerance)?;
        count("kappa_cases", self.kappa_cases, 0, 100_000)?;
        count("kappa_max_modes", self.kappa_max_modes, 1, 8)?;
        if !(self.kappa_beta_norm > 0.0 && self.kappa_beta_norm < 1.0) {
            return Err(invalid("kappa_beta_norm", format!("must lie in (0, 1), got {}", self.kappa_beta_norm)));
        }
        tolerance("kappa_tolerance", self.kappa_tolerance)
    }
}

/// Pair creation in a switched field and vacuum persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchwingerParams {
    pub mass: f64,
    /// Field strength `eE`.
    pub e_field: f64,
    /// Values of `ξ = (m² + p⊥²)/|eE|`, converted to `p_x` with `p_y = 0`.
    pub xi: Vec<f64>,
    /// Additional transverse momenta `[p_x, p_y]`, appended after the `ξ` grid.
    pub p_perp: Vec<[f64; 2]>,
    pub p_z: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp: Option<RampShape>,
    pub dt: f64,
    pub lambda: f64,
    pub representation: Representation,
    pub persistence: PersistenceSettings,
    pub rel_err_tolerance: f64,
    pub drift_tolerance: f64,
    pub persistence_tolerance: f64,
}

impl Default for SchwingerParams {
    fn default() -> Self {
        let job = SchwingerJob::new(1.0, 1.0, Vec::new());
        Self {
            mass: job.mass,
            e_field: job.e_field,
            xi: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            p_perp: Vec::new(),
            p_z: job.p_z,
            duration: job.duration,
            ramp: job.ramp,
            dt: job.dt,
            lambda: job.lambda,
            representation: job.representation,
            persistence: job.persistence,
            rel_err_tolerance: 0.02,
            drift_tolerance: 0.005,
            persistence_tolerance: 1e-6,
        }
    }
}

impl SchwingerParams {
    /// The module-level job described by these parameters.
    pub fn job(&self) -> fermivar::Result<SchwingerJob> {
        let mut p_perp = SchwingerJob::xi_grid(self.mass, self.e_field, &self.xi)?;
        p_perp.extend_from_slice(&self.p_perp);
        let mut job = SchwingerJob::new(self.mass, self.e_field, p_perp);
        job.p_z = self.p_z.clone();
        job.duration = self.duration;
        job.ramp = self.ramp;
        job.dt = self.dt;
        job.lambda = self.lambda;
        job.representation = self.representation;
        job.persistence = self.persistence;
        Ok(job)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let job = self.job().map_err(module(ExperimentKind::Schwinger))?;
        job.validate().map_err(module(ExperimentKind::Schwinger))?;
        tolerance("rel_err_tolerance", self.rel_err_tolerance)?;
        tolerance("drift_tolerance", self.drift_tolerance)?;
        tolerance("persistence_tolerance", self.persistence_tolerance)
    }
}

/// Lattice Poincaré relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareParams {
    pub sites: Vec<usize>,
    pub mass: f64,
    pub spacing: f64,
    pub scheme: Scheme,
    pub lambda: f64,
}

impl Default for PoincareParams {
    fn default() -> Self {
        Self { sites: vec![2, 3, 4], mass: 1.0, spacing: 1.0, scheme: Scheme::Slac, lambda: 2.0 }
    }
}

impl PoincareParams {
    fn validate(&self) -> Result<(), ConfigError> {
        non_empty("sites", &self.sites)?;
        for &n in &self.sites {
            count("sites", n, 2, poincare::MAX_SITES)?;
        }
        let mut sorted = self.sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.sites {
            return Err(invalid("sites", "must be strictly increasing"));
        }
        tolerance("mass", self.mass)?;
        positive("spacing", self.spacing)?;
        gaussian::check_lambda(self.lambda).map_err(module(ExperimentKind::Poincare))
    }
}

/// Which Gaussian pair the interaction experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionState {
    /// The stored two-component instance.
    Golden,
    /// Two random covariances drawn from the seed.
    Random,
}

/// Nonlinear self-interaction sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractionParams {
    /// Coupling `G` of the ratio and inequality checks; `2G` is also evaluated.
    pub coupling: f64,
    /// Couplings of the scaling table.
    pub scan: Vec<f64>,
    pub lambda: f64,
    pub mass: f64,
    /// Momentum of the single site; one component gives a two-component spinor.
    pub momentum: Vec<f64>,
    pub state: InteractionState,
    pub ratio_tolerance: f64,
    /// Smallest difference norm that counts as a genuine inequality.
    pub difference_floor: f64,
    pub additivity_tolerance: f64,
}

impl Default for InteractionParams {
    fn default() -> Self {
        Self {
            coupling: 0.1,
            scan: vec![0.025, 0.05, 0.1, 0.2, 0.4],
            lambda: 2.0,
            mass: 1.0,
            momentum: vec![0.3],
            state: InteractionState::Golden,
            ratio_tolerance: 1e-8,
            difference_floor: 1e-6,
            additivity_tolerance: 1e-12,
        }
    }
}

impl InteractionParams {
    /// The interaction specification at coupling `coupling`.
    pub fn spec(&self, coupling: f64) -> fermivar::Result<interaction::InteractionSpec> {
        let h = fermivar::dirac::h_momentum(&self.momentum, self.mass)?;
        Ok(interaction::InteractionSpec { coupling, spinor_dim: h.nrows(), lambda: self.lambda, h })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        positive("coupling", self.coupling)?;
        for &g in &self.scan {
            positive("scan", g)?;
        }
        let spec = self.spec(self.coupling).map_err(module(ExperimentKind::Interaction))?;
        spec.validate().map_err(module(ExperimentKind::Interaction))?;
        if self.state == InteractionState::Golden && spec.dim() != 2 {
            return Err(invalid("state", "the golden instance lives on two modes; use a one-component momentum"));
        }
        tolerance("ratio_tolerance", self.ratio_tolerance)?;
        tolerance("difference_floor", self.difference_floor)?;
        tolerance("additivity_tolerance", self.additivity_tolerance)
    }
}

/// Experiment-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Selftest(SelftestParams),
    Fluctuation(FluctuationParams),
    Vacuum(VacuumParams),
    Evolve(EvolveParams),
    Schwinger(SchwingerParams),
    Poincare(PoincareParams),
    Interaction(InteractionParams),
}

impl Parameters {
    /// Every default for `kind`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::Selftest => Self::Selftest(Default::default()),
            ExperimentKind::Fluctuation => Self::Fluctuation(Default::default()),
            ExperimentKind::Vacuum => Self::Vacuum(Default::default()),
            ExperimentKind::Evolve => Self::Evolve(Default::default()),
            ExperimentKind::Schwinger => Self::Schwinger(Default::default()),
            ExperimentKind::Poincare => Self::Poincare(Default::default()),
            ExperimentKind::Interaction => Self::Interaction(Default::default()),
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::Selftest(_) => ExperimentKind::Selftest,
            Self::Fluctuation(_) => ExperimentKind::Fluctuation,
            Self::Vacuum(_) => ExperimentKind::Vacuum,
            Self::Evolve(_) => ExperimentKind::Evolve,
            Self::Schwinger(_) => ExperimentKind::Schwinger,
            Self::Poincare(_) => ExperimentKind::Poincare,
            Self::Interaction(_) => ExperimentKind::Interaction,
        }
    }

    fn from_table(kind: ExperimentKind, table: toml::Table) -> Result<Self, ConfigError> {
        fn typed<T: serde::de::DeserializeOwned>(table: toml::Table) -> Result<T, ConfigError> {
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| ConfigError::Parse(format!("[parameters]: {e}")))
        }
        Ok(match kind {
            ExperimentKind::Selftest => Self::Selftest(typed(table)?),
            ExperimentKind::Fluctuation => Self::Fluctuation(typed(table)?),
            ExperimentKind::Vacuum => Self::Vacuum(typed(table)?),
            ExperimentKind::Evolve => Self::Evolve(typed(table)?),
            ExperimentKind::Schwinger => Self::Schwinger(typed(table)?),
            ExperimentKind::Poincare => Self::Poincare(typed(table)?),
            ExperimentKind::Interaction => Self::Interaction(typed(table)?),
        })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Self::Selftest(p) => p.validate(),
            Self::Fluctuation(p) => p.validate(),
            Self::Vacuum(p) => p.validate(),
            Self::Evolve(p) => p.validate(),
            Self::Schwinger(p) => p.validate(),
            Self::Poincare(p) => p.validate(),
            Self::Interaction(p) => p.validate(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    threads: Option<usize>,
    #[serde(default)]
    parameters: toml::Table,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub parameters: Parameters,
}

impl ExperimentConfig {
    /// A configuration with every parameter at its default.
    pub fn defaults(experiment: ExperimentKind, seed: u64) -> Self {
        Self { experiment, seed, output_dir: None, threads: None, parameters: Parameters::defaults(experiment) }
    }

    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let parameters = Parameters::from_table(raw.experiment, raw.parameters)?;
        let config = Self {
            experiment: raw.experiment,
            seed: raw.seed,
            output_dir: raw.output_dir,
            threads: raw.threads,
            parameters,
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Checks every guard of the computational modules.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.parameters.kind() != self.experiment {
            return Err(ConfigError::Mismatch { cli: self.experiment, file: self.parameters.kind() });
        }
        if let Some(t) = self.threads {
            count("threads", t, 1, 1024)?;
        }
        self.parameters.validate()
    }

    /// The configuration as a TOML document with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration values are always representable in TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let config = ExperimentConfig::defaults(kind, 3);
            config.validate().unwrap();
            let text = config.to_toml();
            assert_eq!(ExperimentConfig::parse(&text).unwrap(), config, "{kind}:\n{text}");
        }
    }

    #[test]
    fn minimal_document_fills_defaults() {
        let config = ExperimentConfig::parse("experiment = \"poincare\"\nseed = 1\n").unwrap();
        assert_eq!(config.parameters, Parameters::Poincare(PoincareParams::default()));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let top = ExperimentConfig::parse("experiment = \"vacuum\"\nseed = 1\ncolour = 2\n");
        assert!(matches!(top, Err(ConfigError::Parse(_))));
        let nested = ExperimentConfig::parse("experiment = \"vacuum\"\nseed = 1\n[parameters]\nsite = [2]\n");
        assert!(matches!(nested, Err(ConfigError::Parse(_))));
    }

    #[test]
    fn module_guards_run_at_parse_time() {
        let lambda = ExperimentConfig::parse("experiment = \"vacuum\"\nseed = 1\n[parameters]\nlambda = -1.0\n");
        assert!(matches!(lambda, Err(ConfigError::Module { .. })));
        let sites = ExperimentConfig::parse("experiment = \"poincare\"\nseed = 1\n[parameters]\nsites = [2, 5]\n");
        assert!(matches!(sites, Err(ConfigError::Invalid { field: "sites", .. })));
        let xi = ExperimentConfig::parse("experiment = \"schwinger\"\nseed = 1\n[parameters]\nxi = [0.5]\n");
        assert!(matches!(xi, Err(ConfigError::Module { .. })), "{xi:?}");
    }

    #[test]
    fn nested_settings_parse() {
        let text =
            "experiment = \"schwinger\"\nseed = 4\n[parameters]\nramp = { shape = \"smooth_tanh\", width = 3.0 }\n\
                    representation = \"full\"\n[parameters.persistence]\nnodes = 32\n";
        let config = ExperimentConfig::parse(text).unwrap();
        let Parameters::Schwinger(p) = &config.parameters else { panic!() };
        assert_eq!(p.ramp, Some(RampShape::SmoothTanh { width: 3.0 }));
        assert_eq!(p.representation, Representation::Full);
        assert_eq!(p.persistence.nodes, 32);
        assert_eq!(ExperimentConfig::parse(&config.to_toml()).unwrap(), config);
    }
}
