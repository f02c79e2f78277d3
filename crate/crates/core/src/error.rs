use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: only 2 and 4 are supported")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("missing required rows: {}", .0.join(", "))]
    MissingRows(Vec<String>),

    #[error("underdetermined reconstruction: {}", .0.join(", "))]
    Underdetermined(Vec<String>),

    #[error("{0}")]
    Validation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
