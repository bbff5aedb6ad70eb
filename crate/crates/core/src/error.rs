use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("evaluation at t = {t} is beyond the validity horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("numerical error at t = {time}: {message}")]
    Numerical { time: f64, message: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("relative entropy is infinite: reference vanishes where the density is positive (x = {x})")]
    InfiniteEntropy { x: f64 },

    #[error("Fisher information unreliable: {excluded_fraction:.3} of the mass lies in excluded cells")]
    UnreliableFisher { excluded_fraction: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}
