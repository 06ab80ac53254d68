//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the physics and estimation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Species identifier not present in the table.
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    /// A numeric input violated a domain precondition.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// Laser detuning too close to an atomic resonance for the
    /// adiabatic-elimination formulas to be valid.
    #[error("detuning within {guard:.3e} rad/s of a resonance pole (offence: {offence:.3e} rad/s)")]
    PoleProximity { guard: f64, offence: f64 },

    /// Series or iteration failed to converge.
    #[error("non-convergence in {context}: {message}")]
    NonConvergence { context: &'static str, message: String },

    /// State norm deviated from unity beyond the allowed tolerance.
    #[error("state norm {norm} violates normalization (|norm - 1| > {tolerance:.1e})")]
    NormViolation { norm: f64, tolerance: f64 },

    /// Adaptive integrator step size fell below the representable floor.
    #[error("step size underflow at t = {t:.6e} s (h = {h:.3e} s)")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// Integrator finished but the solution norm drifted beyond 100·tol.
    #[error("integrator norm drift {drift:.3e} exceeds {limit:.3e}")]
    NormDrift { drift: f64, limit: f64 },

    /// Fit design matrix is singular or the data cannot constrain the model.
    #[error("degenerate fit design: {0}")]
    DegenerateDesign(String),

    /// Inputs are mutually inconsistent (e.g. raw visibility above SPAM limit).
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    /// Malformed species table or dataset file.
    #[error("parse error in {context}: {message}")]
    Parse { context: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain { context, message: message.into() }
    }
}
