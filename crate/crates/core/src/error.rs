//! Crate-wide error type.
//!
//! Errors are grouped by the kind of failure so that callers (in particular
//! the CLI) can map them to distinct exit codes: domain errors are violated
//! mathematical preconditions, while `Precision`/`Depth` errors mean a
//! truncation or exploration bound was too small and should be raised.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A mathematical precondition was violated (division by zero,
    /// non-prime modulus, wrong rank, mismatched contexts, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A Laurent-series computation would need coefficients beyond the
    /// certified precision window.
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// A tree exploration or extension-degree bound was too small.
    #[error("depth/bound exhausted: {0}")]
    Depth(String),

    /// Input text did not match the polynomial/field grammar.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub fn depth(msg: impl Into<String>) -> Self {
        Error::Depth(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
