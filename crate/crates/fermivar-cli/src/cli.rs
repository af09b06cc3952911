//! The `fermivar` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::record::Verdict;
use crate::{execute, resolve_output_dir, write_artifacts, CONFIG_ERROR_EXIT};

/// Runs one experiment of the finite-mode fermion laboratory.
///
/// Exit codes: 0 all verdicts pass, 2 computational failure, 3 verdict
/// failure, 4 configuration error.
#[derive(Parser, Debug)]
#[command(name = "fermivar", version)]
struct Cli {
    /// Experiment to run; must match the `experiment` key of the configuration.
    #[arg(value_enum)]
    experiment: ExperimentKind,

    /// Configuration file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `FERMIVAR_OUTPUT_DIR` and `output_dir`.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Print only the final status line.
    #[arg(long, short)]
    quiet: bool,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let config = ExperimentConfig::load(&cli.config)?;
    if config.experiment != cli.experiment {
        return Err(ConfigError::Mismatch { cli: cli.experiment, file: config.experiment });
    }
    Ok(config)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            return CONFIG_ERROR_EXIT;
        }
    };
    let config = match load(&cli) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("fermivar: {e}");
            return CONFIG_ERROR_EXIT;
        }
    };
    let outcome = execute(&config);
    let dir = resolve_output_dir(cli.output.as_deref(), &config);
    if let Err(e) = write_artifacts(&outcome, &dir) {
        eprintln!("fermivar: cannot write results to {}: {e}", dir.display());
        return 2;
    }
    if !cli.quiet {
        for m in &outcome.record.metrics {
            let tag = match m.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Info => "INFO",
            };
            let value = m.value.map_or_else(|| "non-finite".to_string(), |v| format!("{v:.6e}"));
            println!("{tag:<4}  {:<40} {value}", m.name);
        }
    }
    if let Some(e) = &outcome.record.error {
        eprintln!("fermivar: computation failed: {e}");
    }
    println!(
        "{}: {:?} ({} failing metrics), results in {}",
        config.experiment,
        outcome.record.status,
        outcome.record.failing_metrics().count(),
        dir.display()
    );
    outcome.exit_code()
}
