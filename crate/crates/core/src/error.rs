//! Shared error type for the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry: {0}")]
    NonFinite(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("SVD iteration failed to converge")]
    NonConvergence,
    #[error("matrix is singular to working precision")]
    SingularToWorkingPrecision,
    #[error("degenerate reference: {0}")]
    DegenerateReference(String),
}

pub type Result<T> = std::result::Result<T, Error>;
