use thiserror::Error;

/// Errors produced by instance construction, solvers, and generators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must be greater than 1, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid strategy configuration: {0}")]
    InvalidStrategy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for {operation}: n = {n} exceeds limit {limit}")]
    TooLarge {
        operation: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("instance format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
