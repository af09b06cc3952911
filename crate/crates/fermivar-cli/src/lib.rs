//! Reproducible experiment runner for the `fermivar` laboratory.
//!
//! A run reads one configuration file (see [`config`] for the grammar),
//! executes the named experiment, and writes into the output directory:
//!
//! * `results.json`: the [`record::ResultRecord`], byte-identical for identical
//!   configurations;
//! * `metadata.json`: wall time, start time and version, kept apart so the
//!   record stays deterministic;
//! * one CSV file per table (see [`table`] for the dialect).
//!
//! Exit codes: 0 when every verdict passes, 2 on a computational failure, 3
//! on a verdict failure, 4 on a configuration error.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod record;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use config::ExperimentConfig;
use record::{content_hash, ResultRecord, Status, Verdict, SCHEMA_VERSION};
use table::Table;

/// The one environment variable the harness reads.
pub const OUTPUT_ENV: &str = "FERMIVAR_OUTPUT_DIR";

/// Exit code for a rejected configuration or command line.
pub const CONFIG_ERROR_EXIT: u8 = 4;

/// Everything a finished run produced, before it is written to disk.
#[derive(Debug)]
pub struct Outcome {
    pub record: ResultRecord,
    pub tables: Vec<Table>,
    pub wall_time: Duration,
    pub started_at: SystemTime,
    /// Worker threads available to the module sweeps.
    pub threads: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.record.status.exit_code()
    }
}

/// The configuration inputs that determine the results: everything except
/// where they are written.
fn hashed_inputs(config: &ExperimentConfig) -> Vec<u8> {
    let mut inputs = config.clone();
    inputs.output_dir = None;
    serde_json::to_vec(&inputs).expect("configurations serialize to JSON")
}

/// Runs the experiment in memory without touching any clock, returning the
/// record and its tables.
pub fn evaluate(config: &ExperimentConfig) -> (ResultRecord, Vec<Table>) {
    let mut out = experiments::Output::default();
    let mut run = || experiments::run(&config.parameters, config.seed, &mut out);
    let result = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(fermivar::Error::InvalidParameter { name: "threads", reason: e.to_string() }),
        },
        None => run(),
    };
    let metrics = out.recorder.into_metrics();
    let (status, error) = match result {
        Err(e) => (Status::ComputationalFailure, Some(e.to_string())),
        Ok(()) if metrics.iter().any(|m| m.verdict == Verdict::Fail) => (Status::VerdictFailure, None),
        Ok(()) => (Status::Pass, None),
    };
    let record = ResultRecord {
        schema_version: SCHEMA_VERSION,
        experiment: config.experiment.name().to_string(),
        config: serde_json::to_value(config).expect("configurations serialize to JSON"),
        input_hash: content_hash(&hashed_inputs(config)),
        status,
        error,
        metrics,
        artifacts: out.tables.iter().map(Table::file_name).collect(),
    };
    (record, out.tables)
}

/// Runs the experiment in memory and times it.
pub fn execute(config: &ExperimentConfig) -> Outcome {
    let started_at = SystemTime::now();
    let clock = Instant::now();
    let (record, tables) = evaluate(config);
    let wall_time = clock.elapsed();
    let threads = config.threads.unwrap_or_else(rayon::current_num_threads);
    Outcome { record, tables, wall_time, started_at, threads }
}

/// Output directory: the command-line value, then the environment, then the
/// configuration, then `results/<experiment>`.
pub fn resolve_output_dir(cli: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = cli {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    config.output_dir.clone().unwrap_or_else(|| PathBuf::from("results").join(config.experiment.name()))
}

#[derive(Serialize)]
struct Metadata<'a> {
    schema_version: u32,
    experiment: &'a str,
    input_hash: &'a str,
    started_at_unix_seconds: f64,
    wall_time_seconds: f64,
    fermivar_version: &'static str,
    threads: usize,
}

fn pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("records serialize to JSON");
    bytes.push(b'\n');
    bytes
}

/// The exact bytes of `results.json` for a record.
pub fn results_json(record: &ResultRecord) -> Vec<u8> {
    pretty_json(record)
}

/// Writes `results.json`, `metadata.json` and every table into `dir`.
pub fn write_artifacts(outcome: &Outcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for table in &outcome.tables {
        table.write(dir)?;
    }
    std::fs::write(dir.join("results.json"), results_json(&outcome.record))?;
    let metadata = Metadata {
        schema_version: SCHEMA_VERSION,
        experiment: &outcome.record.experiment,
        input_hash: &outcome.record.input_hash,
        started_at_unix_seconds: outcome.started_at.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
        wall_time_seconds: outcome.wall_time.as_secs_f64(),
        fermivar_version: env!("CARGO_PKG_VERSION"),
        threads: outcome.threads,
    };
    std::fs::write(dir.join("metadata.json"), pretty_json(&metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::{ExperimentKind, Parameters, SelftestParams};

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Selftest, 5);
        c.parameters = Parameters::Selftest(SelftestParams {
            gaussian_cases: 8,
            norm_cases: 1,
            property_cases: 3,
            ..Default::default()
        });
        c
    }

    #[test]
    fn records_are_reproducible_and_ignore_the_output_location() {
        let a = execute(&small());
        let mut moved = small();
        moved.output_dir = Some(PathBuf::from("elsewhere"));
        let b = execute(&moved);
        assert_eq!(a.record.status, Status::Pass);
        assert_eq!(a.record.input_hash, b.record.input_hash);
        assert_eq!(results_json(&a.record), results_json(&execute(&small()).record));
    }

    #[test]
    fn hash_changes_with_the_seed() {
        let mut other = small();
        other.seed += 1;
        assert_ne!(execute(&small()).record.input_hash, execute(&other).record.input_hash);
    }

    #[test]
    fn output_precedence() {
        let mut c = small();
        assert_eq!(resolve_output_dir(Some(Path::new("x")), &c), PathBuf::from("x"));
        if std::env::var_os(OUTPUT_ENV).is_none() {
            assert_eq!(resolve_output_dir(None, &c), PathBuf::from("results/selftest"));
            c.output_dir = Some(PathBuf::from("y"));
            assert_eq!(resolve_output_dir(None, &c), PathBuf::from("y"));
        }
    }
}
