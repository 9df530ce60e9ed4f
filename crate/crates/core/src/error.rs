//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field contains a non-finite value (first at index {index})")]
    NonFinite { index: usize },

    #[error(
        "boundary decay violated: |f| = {magnitude:.3e} on |x| > {fraction}·L \
         exceeds {tolerance:.3e}·max|f|; enlarge the domain"
    )]
    BoundaryDecay {
        magnitude: f64,
        fraction: f64,
        tolerance: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spectrum exceeds the filter bank range: {0}")]
    BankRange(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
