//! Oracle-based checks. The constructive side (series, composition,
//! application) is ground truth; printed closed forms are claims.

mod checks;
mod corpus;
mod maroni;
mod recurrence;
mod sigma;

use std::fmt;

use serde::Serialize;

pub use checks::{
    check_eigenfunction, check_l1_double, check_lowering, check_operator_identity, check_poly_claim,
    check_table_claim, compare_diffop,
};
pub use corpus::{audit_family, audit_with_table, Example, builtin_corpus, full_report, CorpusEntry, Report, Summary};
pub use maroni::{maroni_check, FunctionalTable};
pub use recurrence::{compare_recurrence, compare_recurrence_values, extract_recurrence, RecurrenceTable};
pub use sigma::check_sigma_closed_form;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Match,
    Mismatch,
    NotApplicable,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::Mismatch => "mismatch",
            Status::NotApplicable => "not-applicable",
        }
    }
}

/// Whether a check audits a printed statement or the engine's own consistency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Claim,
    Engine,
}

/// Evidence for a mismatch: the first failing index and both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    pub expected: String,
    pub got: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn new(n: Option<i64>, expected: impl fmt::Display, got: impl fmt::Display) -> Self {
        Witness {
            n,
            expected: expected.to_string(),
            got: got.to_string(),
            difference: None,
            note: None,
        }
    }

    pub fn with_difference(mut self, d: impl fmt::Display) -> Self {
        self.difference = Some(d.to_string());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub status: Status,
    pub origin: Origin,
    /// What is being checked, in words.
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckResult {
    pub fn matched(id: impl Into<String>, claim: impl Into<String>) -> Self {
        CheckResult {
            id: id.into(),
            status: Status::Match,
            origin: Origin::Engine,
            claim: claim.into(),
            label: None,
            witness: None,
        }
    }

    pub fn mismatched(id: impl Into<String>, claim: impl Into<String>, witness: Witness) -> Self {
        CheckResult {
            status: Status::Mismatch,
            witness: Some(witness),
            ..Self::matched(id, claim)
        }
        .relabel()
    }

    pub fn not_applicable(id: impl Into<String>, claim: impl Into<String>, why: impl Into<String>) -> Self {
        CheckResult {
            status: Status::NotApplicable,
            witness: Some(Witness::new(None, "-", "-").with_note(why)),
            ..Self::matched(id, claim)
        }
    }

    pub fn from_outcome(id: impl Into<String>, claim: impl Into<String>, outcome: Option<Witness>) -> Self {
        match outcome {
            None => Self::matched(id, claim),
            Some(w) => Self::mismatched(id, claim, w),
        }
    }

    pub fn is_match(&self) -> bool {
        self.status == Status::Match
    }

    pub fn is_mismatch(&self) -> bool {
        self.status == Status::Mismatch
    }

    pub fn as_claim(mut self) -> Self {
        self.origin = Origin::Claim;
        self.relabel()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_claim(mut self, claim: impl Into<String>) -> Self {
        self.claim = claim.into();
        self
    }

    fn relabel(mut self) -> Self {
        self.label = match (self.status, self.origin) {
            (Status::Mismatch, Origin::Claim) => Some("discrepancy"),
            (Status::Mismatch, Origin::Engine) => Some("engine-error"),
            _ => None,
        };
        self
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14} {}", self.status.name(), self.id)?;
        if let Some(label) = self.label {
            write!(f, " [{label}]")?;
        }
        write!(f, "  {}", self.claim)?;
        if self.status == Status::Mismatch {
            if let Some(w) = &self.witness {
                if let Some(n) = w.n {
                    write!(f, "\n    n = {n}")?;
                }
                write!(f, "\n    expected: {}\n    got:      {}", w.expected, w.got)?;
                if let Some(d) = &w.difference {
                    write!(f, "\n    diff:     {d}")?;
                }
                if let Some(note) = &w.note {
                    write!(f, "\n    note:     {note}")?;
                }
            }
        }
        Ok(())
    }
}
