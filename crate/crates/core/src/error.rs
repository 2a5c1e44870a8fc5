//! Error type shared across the crate.

use thiserror::Error;

use crate::Label;

#[derive(Debug, Error)]
pub enum Error {
    /// Too few rows to fit or evaluate anything.
    #[error("empty data: need at least {min} rows, got {got}")]
    EmptyData { min: usize, got: usize },

    /// A vector or matrix does not match the expected feature dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    /// Two aligned collections have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// The source dataset cannot satisfy the requested counts.
    #[error("insufficient data: requested {requested}, available {available}")]
    InsufficientData { requested: usize, available: usize },

    /// A label not present in the declared label set.
    #[error("label {0} is not in the declared label set")]
    UnknownLabel(Label),

    /// Invalid configuration or argument value.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed file content; `row` is 1-based and counts the header.
    #[error("{path}: row {row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
