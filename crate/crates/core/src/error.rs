use thiserror::Error;

/// Errors raised by the grid, operator, solver and diagnostics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unusable discretization: {0}")]
    BadGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation point {x} outside the grid [{lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("non-finite value in {field} at t = {t}")]
    NonFinite { field: &'static str, t: f64 },

    #[error("support reached the boundary margin at t = {t} (|x| > {limit})")]
    BoundaryMargin { t: f64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
