use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error(
        "not in domain of the inverse x-derivative: zero-x-mode energy fraction {fraction:.3e} exceeds {tolerance:.1e}"
    )]
    NotInDomain { fraction: f64, tolerance: f64 },

    #[error("time step {dt} violates the advective CFL limit; admissible dt is {admissible}")]
    Cfl { dt: f64, admissible: f64 },

    #[error(
        "domain too small: boundary-margin amplitude ratio {ratio:.3e} exceeds {tolerance:.1e} at t = {time}"
    )]
    Margin { time: f64, ratio: f64, tolerance: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("weight class violation at x = {x}, t = {t}: {reason}")]
    WeightViolation { x: f64, t: f64, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incomplete run: {0} has no DONE marker")]
    IncompleteRun(PathBuf),

    #[error("malformed artifact: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
