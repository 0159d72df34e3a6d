//! Prompt construction and the revision ledger.
//!
//! Rule sentences come from the templates carried by each checker, so the
//! prompt states exactly what the evaluator enforces. Revision 0 holds the
//! rules only; each later revision appends curated exemplars (a failed
//! plan, its correction and a note) to its parent's list.

mod exemplar;
mod ledger;
mod render;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{descriptor, ManifestEntry};
use crate::metrics::{EvaluationReport, Percent};
use crate::model::{TransportPref, TravelQuery};

pub use exemplar::{Exemplar, ExemplarStore};
pub use ledger::{RevisionLedger, LEDGER_FILE};
pub use render::{exemplar_constraint_ids, render_prompt, render_revision, EXAMPLES_HEADING, OUTPUT_FORMAT};

/// Default convergence tolerance, in percentage points.
pub const DEFAULT_EPS: Percent = Percent::from_hundredths(50);

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown exemplar {0}")]
    UnknownExemplar(String),
    #[error("unknown constraint {0}")]
    UnknownConstraint(String),
    #[error("unknown query {0}")]
    UnknownQuery(String),
    #[error("exemplar {exemplar_id}: corrected plan still fails {}", failing.join(", "))]
    ExemplarInvariantViolation { exemplar_id: String, failing: Vec<String> },
    #[error("revision R{found} is not the latest (R{latest})")]
    NotLatest { found: u32, latest: u32 },
    #[error("revision ledger is broken: {0}")]
    BrokenLedger(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleBlock {
    pub constraint_id: String,
    pub template: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRevision {
    pub index: u32,
    pub parent: Option<u32>,
    pub rules: Vec<RuleBlock>,
    /// Externally rewritten rule text, stored verbatim. Replaces the
    /// extracted sentences when present; placeholders are still filled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_override: Option<String>,
    pub exemplars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics_snapshot: Option<EvaluationReport>,
}

impl PromptRevision {
    /// Revision 0: every catalogue rule, no exemplars.
    pub fn initial(manifest: &[ManifestEntry]) -> Self {
        PromptRevision {
            index: 0,
            parent: None,
            rules: manifest
                .iter()
                .map(|m| RuleBlock {
                    constraint_id: m.id.clone(),
                    template: m.rule_template.clone(),
                })
                .collect(),
            rule_override: None,
            exemplars: Vec::new(),
            metrics_snapshot: None,
        }
    }

    pub fn id(&self) -> String {
        format!("R{}", self.index)
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.rules
            .iter()
            .filter_map(|r| {
                descriptor(&r.constraint_id).map(|d| ManifestEntry {
                    id: r.constraint_id.clone(),
                    category: d.category,
                    rule_template: r.template.clone(),
                })
            })
            .collect()
    }
}

fn join<I: IntoIterator<Item = S>, S: AsRef<str>>(items: I, sep: &str) -> String {
    items.into_iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().join(sep)
}

/// Fills `{placeholder}` fields from the query.
pub fn instantiate(template: &str, q: &TravelQuery) -> String {
    let forbidden = join(
        q.transport_prefs.iter().map(|p| match p {
            TransportPref::NoFlight => "flights",
            TransportPref::NoSelfDriving => "self-driving",
        }),
        " or ",
    );
    template
        .replace("{budget}", &q.budget.to_string())
        .replace("{house_rules}", &join(q.house_rules.iter().map(|r| r.tag()), ", "))
        .replace("{room_types}", &join(q.room_types.iter().map(|r| r.tag()), ", "))
        .replace("{cuisines}", &join(&q.cuisines, ", "))
        .replace("{forbidden_modes}", &forbidden)
        .replace("{origin}", &q.origin)
        .replace("{route}", &join(&q.destinations, ", "))
        .replace("{n_days}", &q.n_days.to_string())
}

/// One sentence per applicable checker, in manifest order.
pub fn extract_rules(manifest: &[ManifestEntry], q: &TravelQuery) -> Vec<String> {
    manifest
        .iter()
        .filter(|m| descriptor(&m.id).is_none_or(|d| d.applicable(q)))
        .map(|m| instantiate(&m.rule_template, q))
        .collect()
}

/// Builds the child of `prev` with `new_exemplars` appended, skipping ids
/// already present. Each new exemplar is re-verified against its query.
pub fn revise_prompt(
    prev: &PromptRevision,
    new_exemplars: &[Exemplar],
    queries: &[TravelQuery],
    b: &crate::model::ReferenceBundle,
) -> Result<PromptRevision, PromptError> {
    let mut exemplars = prev.exemplars.clone();
    for e in new_exemplars {
        let q = queries
            .iter()
            .find(|q| q.id == e.query_id)
            .ok_or_else(|| PromptError::UnknownQuery(e.query_id.clone()))?;
        e.verify(q, b)?;
        if !exemplars.contains(&e.id) {
            exemplars.push(e.id.clone());
        }
    }
    Ok(PromptRevision {
        index: prev.index + 1,
        parent: Some(prev.index),
        rules: prev.rules.clone(),
        rule_override: prev.rule_override.clone(),
        exemplars,
        metrics_snapshot: None,
    })
}

/// True when the final pass rate and all four micro/macro rates moved by
/// at most `eps`.
pub fn check_convergence(prev: &EvaluationReport, cur: &EvaluationReport, eps: Percent) -> bool {
    let pairs = [
        (prev.final_pass_rate, cur.final_pass_rate),
        (prev.commonsense_micro, cur.commonsense_micro),
        (prev.commonsense_macro, cur.commonsense_macro),
        (prev.hard_micro, cur.hard_micro),
        (prev.hard_macro, cur.hard_macro),
    ];
    pairs.iter().all(|&(a, b)| (b - a).abs() <= eps)
}
