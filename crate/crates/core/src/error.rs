use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a delta kick has no pointwise envelope value")]
    PointwiseUndefined,

    #[error("time {0} is outside the domain t >= 0")]
    OutOfDomain(f64),

    #[error("target action {target} is not attainable (maximum {max})")]
    Unattainable { target: f64, max: f64 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid coupling model: {0}")]
    InvalidModel(String),

    #[error("state count {0} is below the minimum of 3")]
    DimensionTooSmall(usize),

    #[error("dressed spectrum is degenerate (smallest gap {0:e})")]
    DegenerateSpectrum(f64),

    #[error("transfer matrix is singular (determinant {0:e})")]
    SingularTransfer(f64),

    #[error("an eigen-row has a vanishing first component; x_1 = 1 normalization impossible")]
    FirstComponentZero,

    #[error("invalid quantum numbers ({n1}, {n2}): {reason}")]
    InvalidQuantumNumbers { n1: i64, n2: i64, reason: String },

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("time step {dt} does not resolve the fastest scale (need dt <= {max_dt})")]
    UnresolvedTimescale { dt: f64, max_dt: f64 },

    #[error("trajectory time grids differ")]
    GridMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
