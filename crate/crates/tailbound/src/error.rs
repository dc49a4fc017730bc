//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by bound computations and the Lambert W kernel.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are formally valid but make the formula indeterminate
    /// (zero variance, zero spread, all-zero multipliers).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iteration failed to reach the requested tolerance.
    #[error(
        "iteration did not converge after {iterations} steps \
         (last iterate {last_iterate:e}, residual {residual:e})"
    )]
    NoConvergence {
        iterations: u32,
        last_iterate: f64,
        residual: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
