use thiserror::Error;

/// Errors raised by the arithmetic, congruence, descent and pipeline layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid seed: {0}")]
    Seed(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("quadruple is not halvable: norm {0} is odd")]
    NotHalvable(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("no coprime solution exists modulo {0}")]
    NoCoprimeSolution(String),
    #[error("solution is not rescalable: third root is divisible by {0}")]
    NotRescalable(String),
    #[error("descent failed: {0}")]
    DescentFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
