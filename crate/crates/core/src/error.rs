use thiserror::Error;

use crate::equilibrium::PriceProfile;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad index, wrong profile shape, invalid parameter.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A solver precondition (e.g. supermodularity) does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A closed form is undefined for the inputs (negative square-root argument).
    #[error("outside formula domain: {0}")]
    Domain(String),

    /// Some equilibrium demand is non-positive, or a feasible bracket is empty.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Malformed scenario text; the message carries the location.
    #[error("parse error: {0}")]
    Parse(String),

    /// Scenario fields breaking their invariants, all of them at once.
    #[error("invalid scenario: {}", joined(.0))]
    Validation(Vec<Violation>),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("best-response iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NonConvergence {
        iterations: usize,
        last_change: f64,
        last: Box<PriceProfile>,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// One broken invariant, addressed by a dotted field path such as
/// `distribution[2].probability`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
    /// 1-based line in the source document, when known.
    pub line: Option<usize>,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
            line: None,
        }
    }

    pub fn at_line(mut self, line: Option<usize>) -> Self {
        self.line = line;
        self
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

pub(crate) fn joined(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
