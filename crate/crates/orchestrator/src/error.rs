use thiserror::Error;
use tripwise_agents::AgentError;
use tripwise_core::ingest::IngestError;
use tripwise_core::metrics::MetricsError;
use tripwise_core::promptgen::PromptError;

use crate::store::StoreError;

#[derive(Debug, Error)]
pub enum OrchError {
    #[error("{0}")]
    Validation(String),
    #[error("unknown run {0}")]
    UnknownRun(String),
    #[error("unknown query {0}")]
    UnknownQuery(String),
    #[error("unknown revision R{0}")]
    UnknownRevision(u32),
    #[error("corrected plan does not parse: {0}")]
    ParseFailure(String),
    #[error("exemplar {exemplar_id}: corrected plan still fails {}", failing.join(", "))]
    ExemplarInvariantViolation { exemplar_id: String, failing: Vec<String> },
    #[error("{0}")]
    Busy(String),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl OrchError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            OrchError::Backend(_) => 3,
            OrchError::Storage(_) => 4,
            _ => 2,
        }
    }
}

impl From<StoreError> for OrchError {
    fn from(e: StoreError) -> Self {
        OrchError::Storage(e.to_string())
    }
}

impl From<IngestError> for OrchError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::IoFailure { .. } => OrchError::Storage(e.to_string()),
            other => OrchError::Validation(other.to_string()),
        }
    }
}

impl From<MetricsError> for OrchError {
    fn from(e: MetricsError) -> Self {
        OrchError::Validation(e.to_string())
    }
}

impl From<PromptError> for OrchError {
    fn from(e: PromptError) -> Self {
        match e {
            PromptError::ExemplarInvariantViolation { exemplar_id, failing } => {
                OrchError::ExemplarInvariantViolation { exemplar_id, failing }
            }
            PromptError::UnknownQuery(q) => OrchError::UnknownQuery(q),
            PromptError::Io { .. } | PromptError::Json { .. } | PromptError::BrokenLedger(_) => {
                OrchError::Storage(e.to_string())
            }
            other => OrchError::Validation(other.to_string()),
        }
    }
}

impl From<AgentError> for OrchError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::InvalidConfig(m) => OrchError::Validation(m),
            other => OrchError::Backend(other.to_string()),
        }
    }
}
