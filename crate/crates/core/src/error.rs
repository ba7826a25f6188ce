use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "spectral tensor is not conjugate symmetric (deviation {deviation:.3e} at slice {slice})"
    )]
    SymmetryViolation { slice: usize, deviation: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("sampling mask is empty")]
    EmptyMask,

    #[error("target rank {rank} exceeds core size {rows}x{cols}")]
    RankTooLarge {
        rank: usize,
        rows: usize,
        cols: usize,
    },

    #[error("ground truth has zero norm")]
    ZeroTruth,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("slice {slice}: {source}")]
    Slice {
        slice: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NumericalFailure(_) | Error::SymmetryViolation { .. } => true,
            Error::Slice { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
