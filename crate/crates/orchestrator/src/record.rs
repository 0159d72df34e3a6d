use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tripwise_agents::BackendConfig;
use tripwise_core::model::Split;
use tripwise_core::{compute_metrics, EvaluationReport, ParsedPlanResult};

/// One evaluated plan. Text artifacts are referenced by store hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanArtifact {
    pub query_id: String,
    pub prompt: String,
    pub raw_text: String,
    /// Why the backend produced no text, if it failed.
    pub backend_failure: Option<String>,
    pub parsed: ParsedPlanResult,
}

/// A complete evaluation of one revision over one split. Per-plan
/// outcomes live in `report.plans`, aligned with `artifacts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub timestamp: DateTime<Utc>,
    pub split: Split,
    pub backend_fingerprint: String,
    pub backend: BackendConfig,
    pub revision: u32,
    pub revision_id: String,
    pub report: EvaluationReport,
    pub artifacts: Vec<PlanArtifact>,
}

impl RunRecord {
    /// Recomputes the report from the stored outcomes.
    pub fn recompute(&self) -> Result<EvaluationReport, tripwise_core::metrics::MetricsError> {
        compute_metrics(&self.run_id, &self.report.registry, self.report.plans.clone())
    }

    pub fn is_consistent(&self) -> bool {
        self.artifacts.len() == self.report.plans.len()
            && self
                .artifacts
                .iter()
                .zip(&self.report.plans)
                .all(|(a, p)| a.query_id == p.query_id && a.parsed.is_delivered() == p.delivered)
            && self.recompute().as_ref() == Ok(&self.report)
    }
}

/// The index view of a run plus its headline rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub timestamp: DateTime<Utc>,
    pub split: Split,
    pub revision: u32,
    pub revision_id: String,
    pub backend_fingerprint: String,
    pub plans: usize,
    pub delivery_rate: tripwise_core::Percent,
    pub commonsense_micro: tripwise_core::Percent,
    pub commonsense_macro: tripwise_core::Percent,
    pub hard_micro: tripwise_core::Percent,
    pub hard_macro: tripwise_core::Percent,
    pub final_pass_rate: tripwise_core::Percent,
}

impl From<&RunRecord> for RunSummary {
    fn from(r: &RunRecord) -> Self {
        RunSummary {
            run_id: r.run_id.clone(),
            timestamp: r.timestamp,
            split: r.split,
            revision: r.revision,
            revision_id: r.revision_id.clone(),
            backend_fingerprint: r.backend_fingerprint.clone(),
            plans: r.artifacts.len(),
            delivery_rate: r.report.delivery_rate,
            commonsense_micro: r.report.commonsense_micro,
            commonsense_macro: r.report.commonsense_macro,
            hard_micro: r.report.hard_micro,
            hard_macro: r.report.hard_macro,
            final_pass_rate: r.report.final_pass_rate,
        }
    }
}
