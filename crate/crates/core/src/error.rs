use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate coordinate {0}: instance is not generic")]
    DuplicateCoordinate(f64),

    #[error("non-finite coordinate {0}")]
    NonFiniteCoordinate(f64),

    #[error("path is not a bridge (length {len}, sum {sum})")]
    NotABridge { len: usize, sum: i64 },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: String, max: String },

    #[error("size {n} exceeds the limit {limit} for {what}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("moment order {0} is not supported (only 1 and 2)")]
    UnsupportedOrder(u32),

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    QuadratureNonConvergence { error: f64, intervals: usize },

    #[error("invalid path text: {0}")]
    Parse(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
