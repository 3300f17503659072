use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid strategy parameters: {0}")]
    InvalidStrategy(String),

    #[error("dimension must be 1, 2 or 3, got {0}")]
    InvalidDims(u32),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("unknown game '{0}' (expected PD, EG or SH)")]
    UnknownGame(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("concentration must be finite and nonnegative, got {0}")]
    InvalidKappa(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Bessel function overflows at x = {0}")]
    Overflow(f64),

    #[error("quadrature grid too coarse: doubling nodes changed the result by {change:.3e}")]
    GridTooCoarse { change: f64 },

    #[error("no bracket: verdict is '{holds}' at both kappa = {lo} and kappa = {hi}")]
    NoBracket { lo: f64, hi: f64, holds: bool },
}
