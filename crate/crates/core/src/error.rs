use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator produced a non-finite value at atom {atom} (x = {x}, u(x) = {s})")]
    OperatorEvaluation { atom: usize, x: f64, s: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solution leaves the set at atom {atom} (excess {excess:e}); the operator is not a self-map of K")]
    SetViolation { atom: usize, excess: f64 },

    #[error("operator failed certification: {0}")]
    NotNonexpansive(Box<crate::operators::CertificateReport>),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(message.into()))
}
