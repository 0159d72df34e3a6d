//! Executable constraint checkers grouped into commonsense and hard
//! categories.
//!
//! Commonsense checkers always apply. A hard checker applies only when the
//! query states the matching preference; the budget is always stated.
//! Environment constraints are not checked: the reference bundle is the
//! frozen environment.

mod checkers;

use serde::{Deserialize, Serialize};

use crate::ingest::ParsedPlanResult;
use crate::model::{Plan, ReferenceBundle, TravelQuery};

pub use checkers::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Commonsense,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub day: Option<u32>,
    pub field: String,
    pub detail: String,
}

impl Evidence {
    pub(crate) fn at(day: u32, field: &str, detail: impl Into<String>) -> Self {
        Evidence {
            day: Some(day),
            field: field.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn plan_wide(field: &str, detail: impl Into<String>) -> Self {
        Evidence {
            day: None,
            field: field.to_string(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintOutcome {
    pub constraint_id: String,
    pub category: Category,
    pub status: Status,
    pub message: String,
    pub evidence: Vec<Evidence>,
}

impl ConstraintOutcome {
    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

type CheckFn = fn(&Plan, &TravelQuery, &ReferenceBundle) -> Vec<Evidence>;

/// A catalogue entry: identity, category, prompt rule template and the
/// executable check.
pub struct ConstraintDescriptor {
    pub id: &'static str,
    pub category: Category,
    /// Natural-language rule with `{placeholder}` slots filled from the query.
    pub rule_template: &'static str,
    applicable: fn(&TravelQuery) -> bool,
    check: CheckFn,
}

impl std::fmt::Debug for ConstraintDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstraintDescriptor")
            .field("id", &self.id)
            .field("category", &self.category)
            .finish()
    }
}

impl ConstraintDescriptor {
    pub fn applicable(&self, q: &TravelQuery) -> bool {
        (self.applicable)(q)
    }

    /// Runs the check on a delivered plan, honouring applicability.
    pub fn evaluate(&self, p: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> ConstraintOutcome {
        if !self.applicable(q) {
            return self.outcome(Status::NotApplicable, "not applicable".into(), Vec::new());
        }
        let evidence = (self.check)(p, q, b);
        if evidence.is_empty() {
            self.outcome(Status::Pass, "satisfied".into(), evidence)
        } else {
            let message = evidence
                .iter()
                .map(|e| e.detail.as_str())
                .collect::<Vec<_>>()
                .join("; ");
            self.outcome(Status::Fail, message, evidence)
        }
    }

    fn outcome(&self, status: Status, message: String, evidence: Vec<Evidence>) -> ConstraintOutcome {
        ConstraintOutcome {
            constraint_id: self.id.to_string(),
            category: self.category,
            status,
            message,
            evidence,
        }
    }
}

/// Machine-readable catalogue entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub category: Category,
    pub rule_template: String,
}

/// An ordered, possibly reduced, view of the catalogue.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<&'static ConstraintDescriptor>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::full()
    }
}

impl Registry {
    pub fn full() -> Self {
        Registry {
            entries: CATALOGUE.iter().collect(),
        }
    }

    /// The catalogue minus `disabled`. Unknown ids are returned as `Err`.
    pub fn without<S: AsRef<str>>(disabled: &[S]) -> Result<Self, String> {
        for id in disabled {
            if descriptor(id.as_ref()).is_none() {
                return Err(id.as_ref().to_string());
            }
        }
        Ok(Registry {
            entries: CATALOGUE
                .iter()
                .filter(|d| !disabled.iter().any(|x| x.as_ref() == d.id))
                .collect(),
        })
    }

    pub fn entries(&self) -> &[&'static ConstraintDescriptor] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|d| d.id.to_string()).collect()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.iter().any(|d| d.id == id)
    }

    pub fn applicable<'a>(&'a self, q: &'a TravelQuery) -> impl Iterator<Item = &'static ConstraintDescriptor> + 'a {
        self.entries.iter().copied().filter(move |d| d.applicable(q))
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.entries
            .iter()
            .map(|d| ManifestEntry {
                id: d.id.to_string(),
                category: d.category,
                rule_template: d.rule_template.to_string(),
            })
            .collect()
    }

    /// One outcome per applicable checker, in catalogue order. Undelivered
    /// plans fail every applicable checker.
    pub fn check_plan(&self, p: &ParsedPlanResult, q: &TravelQuery, b: &ReferenceBundle) -> Vec<ConstraintOutcome> {
        match p {
            ParsedPlanResult::Delivered { plan } => self.check_delivered(plan, q, b),
            ParsedPlanResult::NotDelivered { reason } => self
                .applicable(q)
                .map(|d| ConstraintOutcome {
                    constraint_id: d.id.to_string(),
                    category: d.category,
                    status: Status::Fail,
                    message: "not delivered".into(),
                    evidence: vec![Evidence::plan_wide("plan", reason.clone())],
                })
                .collect(),
        }
    }

    pub fn check_delivered(&self, plan: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<ConstraintOutcome> {
        self.applicable(q).map(|d| d.evaluate(plan, q, b)).collect()
    }

    /// Ids of applicable checkers that fail.
    pub fn failures(&self, plan: &Plan, q: &TravelQuery, b: &ReferenceBundle) -> Vec<&'static str> {
        self.applicable(q)
            .filter(|d| !(d.check)(plan, q, b).is_empty())
            .map(|d| d.id)
            .collect()
    }
}

/// Looks up a catalogue entry by id.
pub fn descriptor(id: &str) -> Option<&'static ConstraintDescriptor> {
    CATALOGUE.iter().find(|d| d.id == id)
}

/// Checks a parsed plan against the full catalogue.
pub fn check_plan(p: &ParsedPlanResult, q: &TravelQuery, b: &ReferenceBundle) -> Vec<ConstraintOutcome> {
    Registry::full().check_plan(p, q, b)
}
