//! Crate-wide error type.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("set reaches the Gaussian truncation box")]
    TruncationOverflow,
    #[error("infeasible packing: {0}")]
    InfeasiblePacking(String),
    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
