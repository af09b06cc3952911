//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the computational modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two Grassmann elements from algebras with different mode counts were combined.
    #[error("mode-count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    /// A matrix or vector had the wrong shape for the requested operation.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An operation that requires a Grassmann-even element received something else.
    #[error("element is not Grassmann-even")]
    NotEven,

    /// The scalar body of an even element vanished where it must be invertible.
    #[error("element has zero scalar body")]
    ZeroBody,

    /// The norm or normalization integral vanished.
    #[error("zero norm")]
    ZeroNorm,

    /// The requested algebra or operator space exceeds the supported size.
    #[error("size budget exceeded: {what} = {value} (limit {limit})")]
    Budget { what: &'static str, value: usize, limit: usize },

    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A matrix that must be Hermitian is not.
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    /// A matrix inverse was requested for a (numerically) singular matrix.
    #[error("singular matrix (condition number {condition:.3e})")]
    Singular { condition: f64 },

    /// A numerical check inside a computation failed beyond its tolerance.
    #[error("numerical check `{check}` failed: {value:.3e} exceeds {tolerance:.3e}")]
    Numerical { check: &'static str, value: f64, tolerance: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
