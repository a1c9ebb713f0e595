//! Error types shared across the pipeline stages.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input rows, unsorted or duplicate timestamps, bad headers.
    #[error("input format error: {0}")]
    InputFormat(String),

    /// Semantically invalid data (non-positive mid-price, impossible config).
    #[error("data error: {0}")]
    Data(String),

    /// Parameter outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine could not produce a usable result.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
