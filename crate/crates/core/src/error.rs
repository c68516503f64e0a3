use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value violates its invariant. `field` is
    /// a dotted path such as `reservoir.v_min`.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("integration diverged at step {step} (t = {time:.6e} s)")]
    Integration { step: usize, time: f64 },

    #[error("input value {value} outside [0, {max}]")]
    InputDomain { value: f64, max: f64 },

    #[error("slot layout mismatch: {0}")]
    Layout(String),

    #[error("no signal above the {threshold} V threshold")]
    NoSignal { threshold: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("empty training set")]
    EmptyTraining,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("test-case generation gave up after {attempts} candidates ({retained} retained, rate {rate:.3})")]
    Generation {
        attempts: usize,
        retained: usize,
        rate: f64,
    },

    #[error("unrecognized CSV schema with header `{0}`")]
    UnknownSchema(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::InputDomain { .. } | Error::Json { .. } | Error::UnknownSchema(_)
        )
    }
}
