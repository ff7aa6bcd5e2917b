use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the pricing library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model or option input (non-positive volatility, unsorted grid, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The probability of landing inside the barrier window is numerically zero,
    /// so the truncated transition cannot be sampled.
    #[error("degenerate barrier window on interval {interval}: survival probability underflows to 0")]
    DegenerateWindow { interval: usize },

    /// An alternating image series did not reach its tolerance within the term cap.
    #[error("series did not converge to {tol:e} within {max_terms} terms (last term {last:e})")]
    SeriesNotConverged { tol: f64, max_terms: usize, last: f64 },

    /// A density ratio evaluated to NaN, infinity or a negative number.
    #[error("density ratio is not a finite non-negative number: {0}")]
    InvalidRatio(f64),

    /// An intermediate payoff-twist function was not strictly positive.
    #[error("payoff twist h_{step}({value}) = {h} must be strictly positive")]
    InvalidTwist { step: usize, value: f64, h: f64 },

    /// Every atom of a discrete distribution has zero weight.
    #[error("all weights of the discrete support are zero")]
    DegenerateSupport,

    /// Configuration problem, reported against the offending field.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Summary statistics need at least two repetitions per cell.
    #[error("need at least 2 repetitions for method {method} at N={steps}, got {reps}")]
    InsufficientReps { method: String, steps: usize, reps: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
