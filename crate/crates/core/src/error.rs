use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion is too close to zero to invert")]
    ZeroDivisor,
    #[error("pure vector argument has zero length")]
    ZeroVector,
    #[error("line direction has zero length")]
    DegenerateDirection,
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
}

pub type Result<T> = std::result::Result<T, Error>;
