use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("index {index} out of range for length {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("duplicate index {0} in support")]
    DuplicateIndex(usize),

    #[error("lift mismatch: {0} vs {1}")]
    LiftMismatch(usize, usize),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("CSS validation failed: H_X * H_Z^T has {0} nonzero entries")]
    CssViolation(usize),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
