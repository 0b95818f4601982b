//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitianInput(f64),

    #[error("matrix is not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("eigenvalue {value:.3e} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("data does not describe a CPTP map: {0}")]
    NotCptp(String),

    #[error("invalid channel dimensions: {0}")]
    InvalidDims(String),

    #[error("second argument must be full rank (min eigenvalue {0:.3e})")]
    SigmaNotFullRank(f64),

    #[error("alpha {alpha} outside the valid range for the {family} family")]
    AlphaOutOfRange { family: String, alpha: f64 },

    #[error("transition instance has no witness channel")]
    MissingWitness,

    #[error("witness channel is not Gibbs-preserving (residual {0:.3e})")]
    WitnessNotGp(f64),

    #[error("joint channel is not Gibbs-preserving (residual {0:.3e})")]
    JointNotGp(f64),

    #[error("operators do not commute (max commutator entry {0:.3e})")]
    NotCommuting(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
