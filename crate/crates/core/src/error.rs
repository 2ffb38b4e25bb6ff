use thiserror::Error;

/// Errors raised across the crate. Every variant maps to a stable CLI exit path.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("ring mismatch: operands live over p = {left} and p = {right}")]
    RingMismatch { left: u64, right: u64 },
    #[error("invalid residue spec: {0}")]
    InvalidResidue(String),
    #[error("element is not invertible in Z[ζ, 1/p]: {0}")]
    NotAUnit(String),
    #[error("inadmissible coloring: {0}")]
    Admissibility(String),
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: u64 },
    #[error("not a rational homology sphere: b1 = {0}")]
    NotRationalHomologySphere(usize),
    #[error("integrality violation: {0}")]
    Integrality(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("degenerate setup: {0}")]
    Degenerate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
