use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range for a register of {sites} qutrits")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition did not converge for {key}")]
    EigenFailure { key: String },

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("invalid clustering instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid spin-system configuration: {0}")]
    InvalidSpinConfig(String),

    #[error("pair ({0}, {1}) is not a pair of distinct active spins")]
    InactivePair(usize, usize),

    #[error("instruction {index}: {reason}")]
    Compile { index: usize, reason: String },

    #[error("two-tone angle {omega2} exceeds the single-cycle limit {limit} at the selectivity cap")]
    TwoToneOverdrive { omega2: f64, limit: f64 },

    #[error("cache corruption: key {key} maps to a non-identical unitary")]
    CacheCorruption { key: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
