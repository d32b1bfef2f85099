use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("keystream period exhausted: need {needed} bits, period is {period}")]
    PeriodExhausted { needed: u128, period: u128 },

    #[error("plaintext entry {index} is zero")]
    ZeroEntry { index: usize },

    #[error("plaintext entry {index} = {value} exceeds the bound {bound}")]
    OutOfBound {
        index: usize,
        value: i64,
        bound: i64,
    },

    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("inconsistent plaintext/ciphertext pair: {0}")]
    Inconsistent(String),

    #[error("cardinality mismatch: expected {expected}, found {actual}")]
    CardinalityMismatch { expected: usize, actual: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("search exhausted after {draws} draws")]
    Exhausted { draws: u64 },

    #[error("reference signal is zero")]
    ZeroReference,

    #[error("verification mismatch: {0}")]
    Verification(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("schema mismatch: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
