use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Errors raised by model construction, evaluation and the solvers.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Error {
    #[error("domain error: {what} at t={t}: {reason}")]
    Domain {
        what: String,
        t: f64,
        reason: String,
    },

    #[error("probability p{index}({effort}) = {value} outside [0, 1]")]
    ProbabilityRange {
        index: usize,
        effort: f64,
        value: f64,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid effort interval [{min}, {max}]")]
    InvalidInterval { min: f64, max: f64 },

    #[error("scenario is not two-outcome linear: {0}")]
    NotTwoOutcomeLinear(String),

    #[error("contract family enumerates {count} candidates, cap is {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },

    #[error("invalid contract family: {0}")]
    InvalidFamily(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn domain(what: impl Into<String>, t: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            what: what.into(),
            t,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every violation found by scenario validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationErrors(pub Vec<Error>);

impl ValidationErrors {
    pub fn errors(&self) -> &[Error] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}
