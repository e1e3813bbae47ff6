//! Structured check records and report documents.
//!
//! Every check carries both sides of its inequality (or identity) and a
//! verdict. Exact rationals are dual-encoded as `num/den` strings plus a
//! decimal approximation so downstream tooling needs no rational parser.

use serde::Serialize;

use crate::{ratio_to_f64, Ratio};

/// Slack allowed before a floating-point inequality counts as violated.
pub const FLOAT_VIOLATION_TOL: f64 = 1e-7;

/// Tolerance for floating-point identities.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Vacuous,
    Violated,
    NotApplicable,
}

/// A numeric value, dual-encoded.
#[derive(Serialize, Clone, Debug)]
pub struct Quantity {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub decimal: f64,
}

impl Quantity {
    pub fn from_ratio(r: &Ratio) -> Quantity {
        Quantity {
            exact: Some(format!("{}/{}", r.numer(), r.denom())),
            decimal: ratio_to_f64(r),
        }
    }

    pub fn from_f64(v: f64) -> Quantity {
        Quantity {
            exact: None,
            decimal: v,
        }
    }

    pub fn none() -> Quantity {
        Quantity {
            exact: None,
            decimal: f64::NAN,
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn exact_ge(name: impl Into<String>, lhs: &Ratio, rhs: &Ratio) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_ratio(lhs),
            rhs: Quantity::from_ratio(rhs),
            verdict: if lhs >= rhs {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            note: None,
        }
    }

    pub fn exact_le(name: impl Into<String>, lhs: &Ratio, rhs: &Ratio) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_ratio(lhs),
            rhs: Quantity::from_ratio(rhs),
            verdict: if lhs <= rhs {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            note: None,
        }
    }

    pub fn exact_eq(name: impl Into<String>, lhs: &Ratio, rhs: &Ratio) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_ratio(lhs),
            rhs: Quantity::from_ratio(rhs),
            verdict: if lhs == rhs {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            note: None,
        }
    }

    /// `lhs >= rhs` up to [`FLOAT_VIOLATION_TOL`]; `vacuous` marks bounds
    /// whose right-hand side is meaningless at this instance size.
    pub fn float_ge(name: impl Into<String>, lhs: f64, rhs: f64, vacuous: bool) -> CheckRecord {
        let verdict = if vacuous {
            Verdict::Vacuous
        } else if lhs >= rhs - FLOAT_VIOLATION_TOL {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_f64(lhs),
            rhs: Quantity::from_f64(rhs),
            verdict,
            note: None,
        }
    }

    pub fn float_le(name: impl Into<String>, lhs: f64, rhs: f64, vacuous: bool) -> CheckRecord {
        let verdict = if vacuous {
            Verdict::Vacuous
        } else if lhs <= rhs + FLOAT_VIOLATION_TOL {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_f64(lhs),
            rhs: Quantity::from_f64(rhs),
            verdict,
            note: None,
        }
    }

    /// Residual-based identity check at [`IDENTITY_TOL`].
    pub fn identity(name: impl Into<String>, residual: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            lhs: Quantity::from_f64(residual),
            rhs: Quantity::from_f64(IDENTITY_TOL),
            verdict: if residual <= IDENTITY_TOL {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            note: Some("residual against tolerance".into()),
        }
    }

    pub fn descriptive(name: impl Into<String>, lhs: Quantity, note: impl Into<String>) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            lhs,
            rhs: Quantity::none(),
            verdict: Verdict::NotApplicable,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckRecord {
        self.note = Some(note.into());
        self
    }
}

/// A full report document emitted by the command-line interface.
#[derive(Serialize, Debug)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn any_violated(&self) -> bool {
        self.records.iter().any(|r| r.verdict == Verdict::Violated)
    }
}
