//! One submodule per experiment. Each fills an [`Output`] and returns early on
//! the first module error, leaving whatever it gathered so far.

use crate::config::Parameters;
use crate::record::{Bound, Recorder};
use crate::table::Table;

pub mod evolve;
pub mod fluctuation;
pub mod interaction;
pub mod poincare;
pub mod schwinger;
pub mod selftest;
pub mod vacuum;

/// Metrics and tables gathered by one experiment.
#[derive(Debug, Default)]
pub struct Output {
    pub recorder: Recorder,
    pub tables: Vec<Table>,
}

impl Output {
    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }
}

/// Runs the experiment described by `parameters`.
pub fn run(parameters: &Parameters, seed: u64, out: &mut Output) -> fermivar::Result<()> {
    match parameters {
        Parameters::Selftest(p) => selftest::run(p, seed, out),
        Parameters::Fluctuation(p) => fluctuation::run(p, seed, out),
        Parameters::Vacuum(p) => vacuum::run(p, out),
        Parameters::Evolve(p) => evolve::run(p, seed, out),
        Parameters::Schwinger(p) => schwinger::run(p, out),
        Parameters::Poincare(p) => poincare::run(p, out),
        Parameters::Interaction(p) => interaction::run(p, seed, out),
    }
}

/// Largest error of a batch of cases, tracked together with the case count.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Worst {
    pub cases: usize,
    pub max: f64,
}

impl Worst {
    pub fn add(&mut self, error: f64) {
        self.cases += 1;
        // NaN must not be swallowed by `max`.
        self.max = if error.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(error) };
    }
}

/// Records `worst` as an at-most check and adds a row to a summary `table`
/// with columns `(check, cases, max_error, tolerance, verdict)`.
pub(crate) fn summarize(out: &mut Output, table: &mut Table, name: &str, description: &str, worst: Worst, limit: f64) {
    out.recorder.check(name, description, worst.max, "absolute", Bound::AtMost { limit });
    let verdict = if worst.max <= limit { "pass" } else { "fail" };
    table.push(vec![name.into(), worst.cases.into(), worst.max.into(), limit.into(), verdict.into()]);
}

pub(crate) const SUMMARY_HEADERS: [&str; 5] = ["check", "cases", "max_error", "tolerance", "verdict"];
