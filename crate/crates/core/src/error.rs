use thiserror::Error;

/// Errors raised by the geometry kernels, estimators and checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data (ragged rows, non-finite coordinates, bad JSON).
    #[error("parse error: {0}")]
    Parse(String),

    /// The r-convex hull is undefined because the circumradius exceeds r.
    #[error("r-convex hull undefined: circumradius {circumradius} exceeds r = {r}")]
    HullUndefined { circumradius: f64, r: f64 },

    /// The input is degenerate for the requested quantity (e.g. circumradius 0).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The input body is empty where a nonempty one is required.
    #[error("empty body")]
    EmptyBody,

    /// An iterative scheme stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    /// The Steiner least-squares system is too ill-conditioned to trust.
    #[error(
        "Steiner fit ill-conditioned (condition number {condition:e}); widen the epsilon grid"
    )]
    FitConditioning { condition: f64 },

    /// A fitted intrinsic volume came out significantly negative.
    #[error("Steiner fit failed: {0}")]
    FitFailure(String),

    /// Internal geometric bookkeeping disagreed beyond tolerance.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
