use thiserror::Error;

use crate::numeric::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Parse failure with the byte offset into the source string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: expected {expected}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pole proximity at {}: |denominator| = {modulus:e}", fmt_point(.point))]
    PoleProximity { point: Vec<C64>, modulus: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("convergence failure: {message} (best error {best_error:e})")]
    Convergence { message: String, best_error: f64 },

    #[error("resource budget exceeded: {size} items, cap {cap}")]
    ResourceBudget { size: u128, cap: usize },

    #[error("assignment is not constant on atoms {atoms:?}")]
    NotMeasurable { atoms: Vec<usize> },

    #[error("selection failed on atoms {atoms:?}: {message}")]
    Selection { atoms: Vec<usize>, message: String },

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("outcome {outcome}: {source}")]
    Outcome { outcome: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// The innermost error, looking through per-outcome wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Outcome { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}

pub(crate) fn fmt_point(p: &[C64]) -> String {
    let parts: Vec<String> = p.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}
