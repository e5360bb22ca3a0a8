//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: asymmetry {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    /// Mismatched matrix/vector dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative numerical procedure failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The adaptive integrator's step size collapsed below the resolution
    /// floor, indicating an unresolvable feature or an inconsistent system.
    #[error("integration step underflow at r = {r:.6e} (h = {h:.3e})")]
    StepUnderflow { r: f64, h: f64 },

    /// No periodic structure could be found in a trajectory.
    #[error("no periodicity detected: {0}")]
    NoPeriodicity(String),

    /// A signal expected to oscillate is essentially constant.
    #[error("signal is not oscillatory (range {range:.3e})")]
    NonOscillatory { range: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
