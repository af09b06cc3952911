//! Self-describing result records.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Version of the `results.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

/// How a metric value is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// `value ≤ limit`.
    AtMost { limit: f64 },
    /// `value > limit`.
    Above { limit: f64 },
    /// `value = 1`, used for boolean properties stored as 0 or 1.
    Holds,
}

impl Bound {
    pub fn admits(self, value: f64) -> bool {
        match self {
            Self::AtMost { limit } => value <= limit,
            Self::Above { limit } => value > limit,
            Self::Holds => value == 1.0,
        }
    }
}

/// Outcome of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded for context only.
    Info,
}

/// One measured quantity with its unit, bound and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub description: String,
    /// `null` when the computation produced a non-finite number.
    pub value: Option<f64>,
    pub unit: String,
    pub bound: Option<Bound>,
    pub verdict: Verdict,
}

/// Overall state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Every judged metric passed.
    Pass,
    /// The computation finished but a metric is outside its bound.
    VerdictFailure,
    /// A module reported an error; the metrics are those gathered before it.
    ComputationalFailure,
}

impl Status {
    /// Process exit code for this status.
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::ComputationalFailure => 2,
            Self::VerdictFailure => 3,
        }
    }
}

/// Contents of `results.json`. Wall-clock data lives in the metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub experiment: String,
    /// The configuration with every default filled in.
    pub config: serde_json::Value,
    /// `sha256` of the canonical configuration wrapped as a git blob.
    pub input_hash: String,
    pub status: Status,
    pub error: Option<String>,
    pub metrics: Vec<Metric>,
    /// CSV files written next to this record.
    pub artifacts: Vec<String>,
}

impl ResultRecord {
    pub fn failing_metrics(&self) -> impl Iterator<Item = &Metric> {
        self.metrics.iter().filter(|m| m.verdict == Verdict::Fail)
    }
}

/// `sha256("blob <len>\0" ‖ bytes)` in hexadecimal.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// Collects the metrics of one run.
#[derive(Debug, Default)]
pub struct Recorder {
    metrics: Vec<Metric>,
}

impl Recorder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: &str, description: &str, value: f64, unit: &str, bound: Option<Bound>) {
        let verdict = match bound {
            None => Verdict::Info,
            Some(b) if value.is_finite() && b.admits(value) => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        self.metrics.push(Metric {
            name: name.to_string(),
            description: description.to_string(),
            // Adding zero folds −0 into +0 so equal results print identically.
            value: value.is_finite().then_some(value + 0.0),
            unit: unit.to_string(),
            bound,
            verdict,
        });
    }

    /// A judged metric.
    pub fn check(&mut self, name: &str, description: &str, value: f64, unit: &str, bound: Bound) {
        self.push(name, description, value, unit, Some(bound));
    }

    /// A judged boolean property.
    pub fn flag(&mut self, name: &str, description: &str, holds: bool) {
        self.push(name, description, if holds { 1.0 } else { 0.0 }, "bool", Some(Bound::Holds));
    }

    /// An unjudged value.
    pub fn info(&mut self, name: &str, description: &str, value: f64, unit: &str) {
        self.push(name, description, value, unit, None);
    }

    pub fn metrics(&self) -> &[Metric] {
        &self.metrics
    }

    pub fn into_metrics(self) -> Vec<Metric> {
        self.metrics
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_matches_git_blob_layout() {
        // The same framing over SHA-1 gives git's empty-blob id; here it is SHA-256.
        assert_eq!(content_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
    }

    #[test]
    fn verdicts_follow_bounds() {
        let mut r = Recorder::new();
        r.check("a", "", 1e-13, "", Bound::AtMost { limit: 1e-12 });
        r.check("b", "", f64::NAN, "", Bound::AtMost { limit: 1.0 });
        r.check("c", "", 1e-7, "", Bound::Above { limit: 1e-6 });
        r.flag("d", "", true);
        r.info("e", "", 3.0, "");
        let v: Vec<Verdict> = r.metrics().iter().map(|m| m.verdict).collect();
        assert_eq!(v, [Verdict::Pass, Verdict::Fail, Verdict::Fail, Verdict::Pass, Verdict::Info]);
        assert_eq!(r.metrics()[1].value, None);
    }
}
