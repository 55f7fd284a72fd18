use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("degenerate ladder gap at M = {m}: |Δ_M| = {gap:e} rad/s is below the gap floor {floor:e} rad/s")]
    DegenerateGap { m: f64, gap: f64, floor: f64 },

    #[error("non-positive ladder gap at M = {m} (Δ_M = {gap:e} rad/s); trade-off bound requires all gaps > 0")]
    NonpositiveGap { m: f64, gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("population {value:e} at index {index} is negative beyond numerical slack")]
    NegativePopulation { index: usize, value: f64 },

    #[error("entropy production rate {0:e} is negative")]
    NegativeEntropyProduction(f64),

    #[error("{what} = {value} is out of range: {reason}")]
    OutOfRange { what: &'static str, value: f64, reason: &'static str },

    #[error("input matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
