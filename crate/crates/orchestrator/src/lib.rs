//! Runs evaluations, keeps the revision ledger and run history on disk,
//! drives the refinement loop and serves triage data over HTTP.

pub mod api;
pub mod error;
pub mod project;
pub mod record;
pub mod store;

pub use error::OrchError;
pub use project::{FailureGroup, LoopOutcome, Project, TriageItem};
pub use record::{PlanArtifact, RunRecord, RunSummary};
pub use store::RunStore;
