//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("basis dimension {0} exceeds cap {1}")]
    DimensionCap(usize, usize),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("operators act on mismatched bases")]
    BasisMismatch,
    #[error("input is not anti-Hermitian (defect {0:.3e})")]
    HermitianityViolation(f64),
    #[error("{what} failed to converge: {detail}")]
    NonConvergence { what: String, detail: String },
    #[error("eigenvalue tracking lost at beta = {beta}: nearest-neighbor ratio {ratio:.3}")]
    TrackingLost { beta: f64, ratio: f64 },
    #[error("evolution step unstable at t = {0} (entry magnitude exceeded 1e6)")]
    StepUnstable(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown figure id: {0}")]
    UnknownFigure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
