//! Library error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Pauli label outside {I, X, Y, Z} was encountered while parsing.
    #[error("unknown Pauli label '{0}'")]
    UnknownLabel(char),

    /// Malformed textual representation of a Pauli string or permutation.
    #[error("parse error: {0}")]
    Parse(String),

    /// Two operands act on different numbers of qubits.
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A numeric precondition was violated; the message names it.
    #[error("domain error: {0}")]
    Domain(String),

    /// A randomized or algebraic construction failed; the message says why.
    #[error("construction failed: {0}")]
    Construction(String),

    /// Two curves do not cross the probed level, so the gap is undefined.
    #[error("no crossing at level {level}")]
    NoCrossing { level: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
