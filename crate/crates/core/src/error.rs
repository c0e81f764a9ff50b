//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by validation, parsing, and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data is malformed (non-finite entries, empty vectors, bad shapes).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix/vector dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The linear solve inside IRLS could not be completed.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// A CSV file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
