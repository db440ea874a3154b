use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("antenna ordering violated: expected m1 >= m2 >= m3, got ({0}, {1}, {2})")]
    Ordering(u32, u32, u32),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("scheme invalid on this channel realization: {0}")]
    InvalidScheme(String),

    #[error("all {0} trials produced invalid schemes")]
    AllTrialsInvalid(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
