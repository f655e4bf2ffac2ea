use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {0} lies in the lower half plane")]
    LowerHalfPlane(num_complex::Complex64),

    #[error("refinement requires a Brownian driver, got {0}")]
    NotBrownian(String),

    #[error("malformed driver file {path}: {reason}")]
    MalformedDriver { path: PathBuf, reason: String },

    #[error("curves are sampled on different time grids")]
    GridMismatch,

    #[error("solver failure: {0}")]
    Solver(#[from] SolverError),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Failures of the reference ODE integrator. A blow-up is not a failure; it is
/// reported through [`crate::odesolver::OdeResult`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("step size underflow at time {time} (h = {step:e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("exceeded {0} steps")]
    TooManySteps(usize),

    #[error("trajectory met the driving term at time {0} during an upward solve")]
    Singular(f64),

    #[error("non-finite state at time {0}")]
    NonFinite(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
