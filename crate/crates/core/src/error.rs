use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("node {0} is not an interior node")]
    NotInterior(usize),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has {got} values, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field value at node {0} is not finite")]
    NonFinite(usize),

    #[error("vector is not in the zero-boundary space: node {0} is {1}")]
    NonZeroBoundary(usize, f64),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("state has not converged (last change {last_change:e} > tol {tol:e})")]
    NotConverged { last_change: f64, tol: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
