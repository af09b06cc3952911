//! `fermivar <experiment> --config <path> [--output <dir>]`

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fermivar_cli::cli::run(std::env::args_os()))
}
