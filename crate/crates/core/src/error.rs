use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pendular basis did not converge for w = {w} by jmax = {limit}")]
    NoConvergence { w: f64, limit: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("at grid point gamma={gamma}, w={w}, omega={omega}: {source}")]
    GridPoint {
        gamma: f64,
        w: f64,
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True when the root cause is a basis-truncation convergence failure.
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::GridPoint { source, .. } => source.is_convergence_failure(),
            _ => false,
        }
    }

    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => true,
            Error::GridPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
