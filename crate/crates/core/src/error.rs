use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("plate-orientation difference {delta} lies outside [-pi, pi]; wrap it first")]
    DeltaOutOfDomain { delta: f64 },

    #[error("closed form requires a half-integer step index, got {0}")]
    NotHalfInteger(f64),

    #[error("closed form requires zero auxiliary phases")]
    NonzeroAuxPhases,

    #[error("amplitude matrix is identically zero; state cannot be normalized")]
    DegenerateState,

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
