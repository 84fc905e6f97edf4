use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge after {evaluations} evaluations (estimate {estimate:e}, error bound {abs_error:e})")]
    QuadratureNotConverged {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("posterior undefined: every component has zero marginal likelihood")]
    UndefinedPosterior,

    #[error("truncation level {m} is below the distinct-occupancy level {required}")]
    TruncationTooLow { m: u64, required: u64 },

    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: row {row}: {message}")]
    Dataset { path: PathBuf, row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input or configuration).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::QuadratureNotConverged { .. } | Error::UndefinedPosterior)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
