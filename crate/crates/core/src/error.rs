use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "tridiagonal eigensolver did not converge for eigenvalue {index} of a {size}x{size} matrix"
    )]
    Convergence { size: usize, index: usize },

    #[error("spectral decomposition is missing row {row} required by the propagator")]
    MissingRows { row: usize },

    #[error("corrupted frame at t = {time}: occupation eigenvalue {value} outside [0, 1]")]
    CorruptFrame { time: f64, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("frame at t = {time} carries only the leading environment rows; operation needs all of them")]
    IncompleteFrame { time: f64 },

    #[error("sector dimension {dim} exceeds the cap of {cap}")]
    SectorTooLarge { dim: usize, cap: usize },

    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("series needs at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("scenario {context}: {reason}")]
    Scenario { context: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn scenario(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Scenario {
            context: context.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
