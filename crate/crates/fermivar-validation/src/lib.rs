//! Independent oracles and the reporting scaffold of the acceptance run in
//! `tests/acceptance.rs`.
//!
//! The oracles deliberately avoid the library's own linear algebra: the
//! determinant is the permutation expansion, the moment matrix is a direct
//! inversion and Schwinger's exponent is summed term by term.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fermivar::linalg::{c, CMatrix};
use fermivar::Complex64;

/// `det a` by the permutation expansion.
pub fn leibniz_det(a: &CMatrix) -> Complex64 {
    fn go(a: &CMatrix, row: usize, used: &mut [bool], sign: f64, acc: Complex64, out: &mut Complex64) {
        let n = a.nrows();
        if row == n {
            *out += acc * sign;
            return;
        }
        // Free columns to the left of the chosen one are the inversions it adds.
        let mut free_before = 0;
        for col in 0..n {
            if used[col] {
                continue;
            }
            used[col] = true;
            let s = if free_before % 2 == 0 { sign } else { -sign };
            go(a, row + 1, used, s, acc * a[(row, col)], out);
            used[col] = false;
            free_before += 1;
        }
    }
    let mut out = Complex64::new(0.0, 0.0);
    go(a, 0, &mut vec![false; a.nrows()], 1.0, Complex64::new(1.0, 0.0), &mut out);
    out
}

/// `−hΔt ((hΔt)² + 1)⁻¹` by direct inversion.
pub fn moment_oracle(h: &CMatrix, dt: f64) -> CMatrix {
    let x = h * c(dt, 0.0);
    let n = h.nrows();
    let inv = (&x * &x + CMatrix::identity(n, n)).try_inverse().expect("(hΔt)² + 1 is invertible for Hermitian h");
    -(x * inv)
}

/// Schwinger's vacuum persistence exponent
/// `−(eE)² VT/(4π³) Σₙ exp(−nπm²/eE)/n²`.
pub fn schwinger_series(mass: f64, field: f64, volume_time: f64) -> f64 {
    let q = (-PI * mass * mass / field).exp();
    let li2: f64 = (1..2000).map(|n| q.powi(n) / (n * n) as f64).sum();
    -field * field * volume_time / (4.0 * PI.powi(3)) * li2
}

/// Largest modulus among the entries of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The judged parts of one criterion.
#[derive(Debug, Default)]
pub struct Judge {
    parts: Vec<(bool, String)>,
}

impl Judge {
    pub fn at_most(&mut self, label: &str, value: f64, limit: f64) {
        self.parts.push((value <= limit, format!("{label} {value:.3e} ≤ {limit:e}")));
    }

    pub fn above(&mut self, label: &str, value: f64, limit: f64) {
        self.parts.push((value > limit, format!("{label} {value:.3e} > {limit:e}")));
    }

    pub fn holds(&mut self, label: &str, ok: bool) {
        self.parts.push((ok, label.to_string()));
    }

    pub fn within(&mut self, label: &str, elapsed: Duration, budget_s: f64) {
        let s = elapsed.as_secs_f64();
        self.parts.push((s < budget_s, format!("{label} {s:.2} s < {budget_s} s")));
    }

    pub fn passed(&self) -> bool {
        self.parts.iter().all(|(ok, _)| *ok)
    }

    /// The parts joined into one line, failing ones marked `NOT`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> =
            self.parts.iter().map(|(ok, label)| if *ok { label.clone() } else { format!("NOT {label}") }).collect();
        parts.join("; ")
    }
}

/// One acceptance criterion.
pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub run: fn(&mut Judge),
}

/// Runs the criteria selected by `filters` (all when empty) one after
/// another, printing one PASS/FAIL line each, and fails if any failed.
pub fn run_criteria(criteria: &[Criterion], filters: &[String]) -> ExitCode {
    let selected =
        |c: &Criterion| filters.is_empty() || filters.iter().any(|f| f == c.id || c.name.contains(f.as_str()));
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    let mut ran = 0;
    for criterion in criteria.iter().filter(|c| selected(c)) {
        ran += 1;
        let clock = Instant::now();
        let mut judge = Judge::default();
        if let Err(payload) = panic::catch_unwind(AssertUnwindSafe(|| (criterion.run)(&mut judge))) {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            judge.holds(&format!("aborted: {message}"), false);
        }
        let verdict = if judge.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict}  {:<4} {}: {} [{:.1} s]",
            criterion.id,
            criterion.name,
            judge.summary(),
            clock.elapsed().as_secs_f64()
        );
        if !judge.passed() {
            failed.push(criterion.id);
        }
    }
    panic::set_hook(default_hook);
    println!("\nacceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_expansion_on_known_matrices() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(leibniz_det(&a), c(-2.0, 0.0));
        let p = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        // A cyclic permutation of three elements is even.
        assert_eq!(leibniz_det(&p), c(1.0, 0.0));
        assert_eq!(leibniz_det(&(CMatrix::identity(4, 4) * c(0.0, 1.0))), c(1.0, 0.0));
    }

    #[test]
    fn series_at_unit_field() {
        // Relative to the leading term the series is 1 + q/4 + q²/9 + q³/16 + … with q = e^{−π}.
        let q = (-PI).exp();
        let leading = -q / (4.0 * PI.powi(3));
        let ratio = schwinger_series(1.0, 1.0, 1.0) / leading;
        let remainder = ratio - (1.0 + q / 4.0 + q * q / 9.0);
        // Every later term is at most q³/16 times a power of q.
        assert!(remainder > q.powi(3) / 16.0 && remainder < q.powi(3) / 16.0 / (1.0 - q), "{remainder:e}");
    }

    #[test]
    fn judge_marks_failures() {
        let mut j = Judge::default();
        j.at_most("a", 1.0, 2.0);
        j.above("b", 1.0, 2.0);
        assert!(!j.passed());
        assert_eq!(j.summary(), "a 1.000e0 ≤ 2e0; NOT b 1.000e0 > 2e0");
    }
}
