use thiserror::Error;

use crate::algebra::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: domain error: {reason}")]
    Domain { func: &'static str, reason: String },

    /// `index` is the 1-based size of the leading minor whose pivot failed.
    #[error("matrix is not positive definite: pivot of leading minor {index} is {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("degenerate conditioning at level {level}: {reason}")]
    Degenerate { level: usize, reason: String },

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: Field, found: Field },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("angle out of open range (0, pi): row {row}, slot {slot}, value {value}")]
    AngleOutOfRange { row: usize, slot: usize, value: f64 },

    #[error("invalid Cholesky factor: {0}")]
    InvalidFactor(String),

    #[error("not a correlation matrix: {0}")]
    NotCorrelation(crate::algebra::Violation),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }
}
