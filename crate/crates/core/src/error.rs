use thiserror::Error;

use crate::ring::Rat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid family spec: {0}")]
    InvalidSpec(String),

    #[error("missing value for parameter {0}")]
    MissingParameter(String),

    #[error("parameter {0} is not declared for this family")]
    UndeclaredParameter(String),

    #[error("q must have zero constant term, found {0}")]
    ConstantTerm(Rat),

    #[error("operator did not lower the degree at step {step}: degree {before} -> {after}")]
    DegreeNotLowered {
        step: usize,
        before: usize,
        after: usize,
    },

    #[error("series did not terminate within {guard} steps")]
    GuardExceeded { guard: usize },

    #[error("computation cancelled")]
    Cancelled,

    #[error("table index {index} referenced but the table stops at {max}")]
    TableOutOfRange { index: i64, max: usize },

    #[error("commutation relation violated: {0}")]
    RelationViolation(String),

    #[error("L1 by composition and L1 by ad-series disagree: {composed} vs {series}")]
    SigmaMismatch { composed: String, series: String },

    #[error("bandwidth is zero; d-orthogonality does not apply")]
    BandwidthZero,

    #[error("table is malformed: {0}")]
    BadTable(String),
}

impl Error {
    /// Errors that indicate an internal inconsistency rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::DegreeNotLowered { .. }
                | Error::GuardExceeded { .. }
                | Error::SigmaMismatch { .. }
                | Error::RelationViolation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
