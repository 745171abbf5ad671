use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff n_max must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("dimension mismatch: {context} (left {left}, right {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("operator or state has non-finite entries")]
    NonFinite,

    #[error("margin {margin} exceeds n_max {n_max}")]
    MarginTooLarge { margin: usize, n_max: usize },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("guard violated: {0}")]
    GuardViolated(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("index {index} outside range 0..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("invalid spin label: {0}")]
    InvalidSpin(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
