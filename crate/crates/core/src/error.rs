use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tender count {n} outside feasible range: {bound}")]
    Domain { n: f64, bound: String },

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("unknown {kind} `{key}`; valid keys: {valid}")]
    Lookup {
        kind: &'static str,
        key: String,
        valid: String,
    },

    #[error("row {row}, column `{column}`: {message}")]
    Ingest {
        row: usize,
        column: String,
        message: String,
    },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input values rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_)) && !matches!(self, Error::Csv(e) if e.is_io_error())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
