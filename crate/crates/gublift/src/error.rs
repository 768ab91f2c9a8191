use thiserror::Error;

/// Errors raised by instance construction, cut computation, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient a[{index}] = {value} is negative")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("function is not usable as a concave bound: {0}")]
    NonConcave(String),

    #[error("sequence is not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation is not partial ascending")]
    NotPartialAscending,

    #[error("GUB constraint violated in block {block}: sum = {sum}")]
    GubViolated { block: usize, sum: f64 },

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model is infeasible")]
    InfeasibleModel,

    #[error("LP did not converge: {0}")]
    LpStalled(String),
}

pub type Result<T> = std::result::Result<T, Error>;
