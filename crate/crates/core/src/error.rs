use thiserror::Error;

/// Errors raised by the region evaluators and optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The requested operating point cannot be met by any test channel.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The operation is not defined for the instance's region branch.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("singular expression: {0}")]
    Singular(String),

    #[error("problem too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
