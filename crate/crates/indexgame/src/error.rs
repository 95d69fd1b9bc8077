use thiserror::Error;

/// Errors surfaced by functionals, solvers, and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("degenerate solver input: {0}")]
    Degenerate(String),
    #[error("overflow guard: {0}")]
    Overflow(String),
    #[error("indefinite stationarity system: {0}")]
    Indefinite(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
