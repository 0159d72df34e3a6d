//! Travel plan evaluation and synthesis.
//!
//! The crate covers the whole offline pipeline: the shared domain model,
//! reference-data ingestion and the plan grammar, the commonsense and hard
//! constraint checkers, pass-rate metrics, a deterministic search-based
//! planner, and prompt construction with a revision ledger.

pub mod constraints;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod money;
pub mod promptgen;
pub mod solver;
pub mod synth;

pub use constraints::{check_plan, Category, ConstraintOutcome, Registry, Status};
pub use ingest::{parse_plan, write_plan, ParsedPlanResult};
pub use metrics::{compute_metrics, diff_reports, EvaluationReport, Percent, PlanEvaluation};
pub use model::{plan_total_cost, validate_query, Plan, ReferenceBundle, TravelQuery};
pub use money::Money;
