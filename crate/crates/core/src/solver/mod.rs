//! Deterministic search for constraint-satisfying plans.
//!
//! The solver works over the assembly space described in [`space`]. Cheap
//! constraints (transport preference, room rules, minimum nights) filter
//! options up front, budget, restaurant diversity and transport conflict
//! prune partial assemblies, and every complete assembly is verified with
//! the constraint registry before it is returned.

mod oracle;
mod search;
pub(crate) mod space;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::Registry;
use crate::model::{validate_query, Plan, ReferenceBundle, TravelQuery};
use crate::money::Money;

pub use oracle::{brute_force_oracle, difficulty_score, Difficulty, OracleResult};
pub use space::route_labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Greedy,
    Beam,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MinCost,
    FirstFeasible,
    /// Most expensive feasible plan. Useful for stress-testing budgets.
    MaxCost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub beam_width: usize,
    pub objective: Objective,
    pub disabled_constraints: BTreeSet<String>,
    /// Carried for reproducibility records; the search itself is deterministic.
    pub random_seed: u64,
    /// Largest assembly count the exhaustive strategy will enumerate.
    pub exhaustive_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Beam,
            beam_width: 8,
            objective: Objective::MinCost,
            disabled_constraints: BTreeSet::new(),
            random_seed: 0,
            exhaustive_cap: 5_000_000,
        }
    }
}

impl SearchConfig {
    pub fn exhaustive() -> Self {
        SearchConfig {
            strategy: Strategy::Exhaustive,
            ..Default::default()
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn disable(mut self, id: &str) -> Self {
        self.disabled_constraints.insert(id.to_string());
        self
    }

    pub fn registry(&self) -> Result<Registry, SolverError> {
        let disabled: Vec<&str> = self.disabled_constraints.iter().map(String::as_str).collect();
        Registry::without(&disabled).map_err(|id| SolverError::InvalidConfig(format!("unknown constraint {id}")))
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.beam_width == 0 {
            return Err(SolverError::InvalidConfig("beam_width must be at least 1".into()));
        }
        self.registry().map(|_| ())
    }
}

/// Why no plan could be produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasible {
    /// The constraint judged responsible.
    pub constraint_id: String,
    pub explanation: String,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("search space of {product} assemblies exceeds the cap of {cap}")]
    CapExceeded { product: u128, cap: u64 },
    #[error("infeasible ({}): {}", .0.constraint_id, .0.explanation)]
    Infeasible(Infeasible),
}

impl SolverError {
    pub fn infeasible(&self) -> Option<&Infeasible> {
        match self {
            SolverError::Infeasible(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub plan: Plan,
    pub cost: Money,
    /// Complete assemblies that went through full verification.
    pub leaves_checked: u64,
}

fn check_query(q: &TravelQuery) -> Result<(), SolverError> {
    let v = validate_query(q);
    if v.is_empty() {
        Ok(())
    } else {
        Err(SolverError::InvalidQuery(
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
        ))
    }
}

/// Searches for a plan satisfying every enabled constraint.
pub fn solve(q: &TravelQuery, b: &ReferenceBundle, config: &SearchConfig) -> Result<Solution, SolverError> {
    check_query(q)?;
    config.validate()?;
    let registry = config.registry()?;
    let search = search::Search::prepare(space::Space::new(q, b), registry, config.objective)?;
    search.run(config)
}

pub fn generate_plan(q: &TravelQuery, b: &ReferenceBundle, config: &SearchConfig) -> Result<Plan, SolverError> {
    solve(q, b, config).map(|s| s.plan)
}
