//! A data directory and every operation on it.
//!
//! ```text
//! reference/*.csv      the sandbox
//! queries.jsonl        train and validation queries
//! revisions/           ledger.json and R<i>.prompt.txt
//! exemplars/<id>.json  curated corrections
//! runs/                run store (see [`crate::store`])
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::Utc;
use serde::{Deserialize, Serialize};
use tripwise_agents::{run_batch, BackendConfig};
use tripwise_core::constraints::ConstraintOutcome;
use tripwise_core::ingest::{parse_reference_csv, read_queries, write_queries, write_reference_csv};
use tripwise_core::metrics::render_table;
use tripwise_core::model::{Plan, Split};
use tripwise_core::promptgen::{
    check_convergence, render_prompt, render_revision, Exemplar, ExemplarStore, RevisionLedger, LEDGER_FILE,
};
use tripwise_core::solver::{generate_plan, SearchConfig};
use tripwise_core::{
    compute_metrics, parse_plan, validate_query, ParsedPlanResult, Percent, PlanEvaluation, ReferenceBundle, Registry,
    Status, TravelQuery,
};

use crate::record::{PlanArtifact, RunRecord, RunSummary};
use crate::store::RunStore;
use crate::OrchError;

pub const REFERENCE_DIR: &str = "reference";
pub const QUERIES_FILE: &str = "queries.jsonl";
pub const REVISIONS_DIR: &str = "revisions";
pub const EXEMPLARS_DIR: &str = "exemplars";
pub const RUNS_DIR: &str = "runs";

const AUTO_NOTE: &str = "Corrected by the reference solver.";

struct Prompts {
    ledger: RevisionLedger,
    exemplars: ExemplarStore,
}

pub struct Project {
    root: PathBuf,
    bundle: ReferenceBundle,
    queries: Vec<TravelQuery>,
    prompts: RwLock<Prompts>,
    runs: RunStore,
    loop_lock: Mutex<()>,
    /// Backend calls in flight per run.
    pub parallelism: usize,
}

/// Failed outcomes of one constraint across a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureGroup {
    pub constraint_id: String,
    pub count: usize,
    pub items: Vec<TriageItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageItem {
    pub query: TravelQuery,
    pub raw_text: String,
    pub plan: Option<Plan>,
    pub outcome: ConstraintOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopOutcome {
    pub records: Vec<RunRecord>,
    pub converged: bool,
    pub stop_reason: String,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).min(8)
}

impl Project {
    /// Creates a data directory holding `bundle`, `queries` and R0.
    pub fn init(root: &Path, bundle: &ReferenceBundle, queries: &[TravelQuery]) -> Result<Self, OrchError> {
        if let Some(v) = bundle.validate().into_iter().next() {
            return Err(OrchError::Validation(format!("{} row {}: {}", v.table, v.row + 1, v.rule)));
        }
        for q in queries {
            if let Some(v) = validate_query(q).into_iter().next() {
                return Err(OrchError::Validation(format!("query {}: {v}", q.id)));
            }
        }
        write_reference_csv(bundle, &root.join(REFERENCE_DIR))?;
        write_queries(&root.join(QUERIES_FILE), queries)?;
        Self::open(root)
    }

    pub fn open(root: &Path) -> Result<Self, OrchError> {
        if !root.is_dir() {
            return Err(OrchError::Storage(format!("data directory {} does not exist", root.display())));
        }
        let bundle = parse_reference_csv(&root.join(REFERENCE_DIR))?;
        let queries = read_queries(&root.join(QUERIES_FILE))?;
        let exemplars = ExemplarStore::load(&root.join(EXEMPLARS_DIR))?;
        let rev_dir = root.join(REVISIONS_DIR);
        let ledger = if rev_dir.join(LEDGER_FILE).exists() {
            RevisionLedger::load(&rev_dir)?
        } else {
            let ledger = RevisionLedger::new(&Registry::full().manifest());
            ledger.save(&rev_dir, &exemplars)?;
            ledger
        };
        for r in ledger.revisions() {
            for id in &r.exemplars {
                exemplars.resolve(id)?;
            }
        }
        Ok(Project {
            runs: RunStore::open(&root.join(RUNS_DIR))?,
            root: root.to_path_buf(),
            bundle,
            queries,
            prompts: RwLock::new(Prompts { ledger, exemplars }),
            loop_lock: Mutex::new(()),
            parallelism: default_parallelism(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn bundle(&self) -> &ReferenceBundle {
        &self.bundle
    }

    pub fn queries(&self) -> &[TravelQuery] {
        &self.queries
    }

    pub fn split_queries(&self, split: Split) -> Vec<TravelQuery> {
        self.queries.iter().filter(|q| q.split == split).cloned().collect()
    }

    pub fn query(&self, id: &str) -> Result<&TravelQuery, OrchError> {
        self.queries
            .iter()
            .find(|q| q.id == id)
            .ok_or_else(|| OrchError::UnknownQuery(id.to_string()))
    }

    pub fn runs(&self) -> &RunStore {
        &self.runs
    }

    pub fn ledger(&self) -> RevisionLedger {
        self.prompts.read().expect("prompt lock").ledger.clone()
    }

    pub fn exemplar(&self, id: &str) -> Option<Exemplar> {
        self.prompts.read().expect("prompt lock").exemplars.get(id).cloned()
    }

    pub fn revision_prompt(&self, index: u32) -> Result<String, OrchError> {
        let p = self.prompts.read().expect("prompt lock");
        let r = p.ledger.get(index).ok_or(OrchError::UnknownRevision(index))?;
        Ok(render_revision(r, &p.exemplars)?)
    }

    /// Evaluates `revision` (latest if `None`) over a split.
    pub fn run_evaluation(
        &self,
        split: Split,
        revision: Option<u32>,
        cfg: &BackendConfig,
    ) -> Result<RunRecord, OrchError> {
        let run_id = self.runs.reserve_run_id();
        self.evaluate_as(&run_id, split, revision, cfg)
    }

    /// Checks that an evaluation could start, without running it.
    pub fn check_evaluation(&self, split: Split, revision: Option<u32>, cfg: &BackendConfig) -> Result<u32, OrchError> {
        cfg.preflight()?;
        let p = self.prompts.read().expect("prompt lock");
        let index = revision.unwrap_or(p.ledger.latest().index);
        p.ledger.get(index).ok_or(OrchError::UnknownRevision(index))?;
        if !self.queries.iter().any(|q| q.split == split) {
            return Err(OrchError::Validation(format!("run has no plans: the {split} split is empty")));
        }
        Ok(index)
    }

    /// Evaluates under a previously reserved run id.
    pub fn evaluate_as(
        &self,
        run_id: &str,
        split: Split,
        revision: Option<u32>,
        cfg: &BackendConfig,
    ) -> Result<RunRecord, OrchError> {
        let index = self.check_evaluation(split, revision, cfg)?;
        let queries = self.split_queries(split);
        let (revision_id, items) = {
            let p = self.prompts.read().expect("prompt lock");
            let r = p.ledger.get(index).ok_or(OrchError::UnknownRevision(index))?;
            let mut items = Vec::with_capacity(queries.len());
            for q in &queries {
                items.push((render_prompt(r, q, &self.bundle, &p.exemplars)?, q.clone()));
            }
            (r.id(), items)
        };
        let outputs = run_batch(&items, &self.bundle, cfg, self.parallelism);
        let registry = Registry::full();
        let mut artifacts = Vec::with_capacity(items.len());
        let mut plans = Vec::with_capacity(items.len());
        for ((prompt, q), out) in items.iter().zip(outputs) {
            let parsed = match &out.failure {
                Some(reason) => ParsedPlanResult::NotDelivered {
                    reason: format!("backend failure: {reason}"),
                },
                None => parse_plan(&out.text, q),
            };
            plans.push(PlanEvaluation {
                query_id: q.id.clone(),
                delivered: parsed.is_delivered(),
                outcomes: registry.check_plan(&parsed, q, &self.bundle),
            });
            artifacts.push(PlanArtifact {
                query_id: q.id.clone(),
                prompt: self.runs.put(prompt.as_bytes())?,
                raw_text: self.runs.put(out.text.as_bytes())?,
                backend_failure: out.failure,
                parsed,
            });
        }
        let report = compute_metrics(run_id, &registry.ids(), plans)?;
        let record = RunRecord {
            run_id: run_id.to_string(),
            timestamp: Utc::now(),
            split,
            backend_fingerprint: cfg.fingerprint(),
            backend: cfg.clone(),
            revision: index,
            revision_id,
            report,
            artifacts,
        };
        self.runs.commit(&record)?;
        if split == Split::Train {
            let mut p = self.prompts.write().expect("prompt lock");
            p.ledger.set_metrics(index, record.report.clone())?;
            p.ledger.save(&self.root.join(REVISIONS_DIR), &p.exemplars)?;
        }
        log::info!(
            "{run_id}: {} {split} plans on {}, final pass rate {}",
            record.artifacts.len(),
            record.revision_id,
            record.report.final_pass_rate
        );
        Ok(record)
    }

    pub fn load_run(&self, run_id: &str) -> Result<RunRecord, OrchError> {
        self.runs
            .load(run_id)?
            .ok_or_else(|| OrchError::UnknownRun(run_id.to_string()))
    }

    pub fn summaries(&self) -> Result<Vec<RunSummary>, OrchError> {
        let mut out = Vec::new();
        for e in self.runs.list() {
            out.push(RunSummary::from(&self.load_run(&e.run_id)?));
        }
        Ok(out)
    }

    /// Failed outcomes grouped by constraint, largest group first.
    pub fn list_failures(&self, run_id: &str) -> Result<Vec<FailureGroup>, OrchError> {
        let run = self.load_run(run_id)?;
        let order = run.report.registry.clone();
        let mut groups: BTreeMap<String, Vec<TriageItem>> = BTreeMap::new();
        for (a, p) in run.artifacts.iter().zip(&run.report.plans) {
            for o in p.outcomes.iter().filter(|o| o.status == Status::Fail) {
                groups.entry(o.constraint_id.clone()).or_default().push(TriageItem {
                    query: self.query(&a.query_id)?.clone(),
                    raw_text: self.runs.get_text(&a.raw_text)?,
                    plan: a.parsed.plan().cloned(),
                    outcome: o.clone(),
                });
            }
        }
        let mut out: Vec<FailureGroup> = groups
            .into_iter()
            .map(|(constraint_id, items)| FailureGroup {
                constraint_id,
                count: items.len(),
                items,
            })
            .collect();
        let rank = |id: &str| order.iter().position(|o| o == id).unwrap_or(usize::MAX);
        out.sort_by(|a, b| b.count.cmp(&a.count).then(rank(&a.constraint_id).cmp(&rank(&b.constraint_id))));
        Ok(out)
    }

    fn failed_ids(run: &RunRecord, query_id: &str) -> Option<(usize, Vec<String>)> {
        let i = run.artifacts.iter().position(|a| a.query_id == query_id)?;
        let ids = run.report.plans[i].failures().map(|o| o.constraint_id.clone()).collect();
        Some((i, ids))
    }

    fn store_exemplar(&self, e: Exemplar) -> Result<String, OrchError> {
        let q = self.query(&e.query_id)?;
        e.verify(q, &self.bundle)?;
        let mut p = self.prompts.write().expect("prompt lock");
        ExemplarStore::save_one(&self.root.join(EXEMPLARS_DIR), &e)?;
        Ok(p.exemplars.insert(e))
    }

    /// Records a human correction of one failed plan from a run.
    pub fn submit_exemplar(&self, run_id: &str, query_id: &str, corrected: &str, note: &str) -> Result<String, OrchError> {
        let run = self.load_run(run_id)?;
        let q = self.query(query_id)?;
        let (i, failed) =
            Self::failed_ids(&run, query_id).ok_or_else(|| OrchError::UnknownQuery(format!("{query_id} in {run_id}")))?;
        if q.split != Split::Train {
            return Err(OrchError::Validation(format!("{query_id} is not a training query")));
        }
        if failed.is_empty() {
            return Err(OrchError::Validation(format!("{query_id} passed every constraint in {run_id}")));
        }
        let plan = match parse_plan(corrected, q) {
            ParsedPlanResult::Delivered { plan } => plan,
            ParsedPlanResult::NotDelivered { reason } => return Err(OrchError::ParseFailure(reason)),
        };
        let e = Exemplar::new(query_id, run.artifacts[i].parsed.clone(), failed, plan, note);
        self.store_exemplar(e)
    }

    /// Appends a revision with `exemplar_ids` added to the latest one.
    pub fn create_revision(&self, exemplar_ids: &[String], rule_override: Option<String>) -> Result<u32, OrchError> {
        let mut p = self.prompts.write().expect("prompt lock");
        let mut picked = Vec::new();
        for id in exemplar_ids {
            picked.push(p.exemplars.resolve(id)?.clone());
        }
        let prev = p.ledger.latest().index;
        let index = p.ledger.revise(prev, &picked, &self.queries, &self.bundle)?.index;
        if rule_override.is_some() {
            p.ledger.set_rule_override(index, rule_override)?;
        }
        p.ledger.save(&self.root.join(REVISIONS_DIR), &p.exemplars)?;
        Ok(index)
    }

    /// Builds a solver-corrected exemplar from the run's worst failing
    /// query not already taught by the latest revision.
    fn mine_exemplar(&self, run: &RunRecord) -> Result<Option<String>, OrchError> {
        let taught = self.ledger().latest().exemplars.clone();
        let mut ranked: Vec<(usize, &PlanArtifact)> = run
            .artifacts
            .iter()
            .zip(&run.report.plans)
            .map(|(a, p)| (p.failures().count(), a))
            .filter(|(n, _)| *n > 0)
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0));
        for (_, a) in ranked {
            let q = self.query(&a.query_id)?;
            let Ok(corrected) = generate_plan(q, &self.bundle, &SearchConfig::default()) else {
                continue;
            };
            let (_, failed) = Self::failed_ids(run, &a.query_id).expect("artifact belongs to run");
            let e = Exemplar::new(&a.query_id, a.parsed.clone(), failed, corrected, AUTO_NOTE);
            if taught.contains(&e.id) || e.verify(q, &self.bundle).is_err() {
                continue;
            }
            return self.store_exemplar(e).map(Some);
        }
        Ok(None)
    }

    /// Evaluates the latest revision, then repeatedly mines an exemplar,
    /// revises and re-evaluates until the rates settle within `eps`,
    /// nothing is left to mine, or `max_iters` runs have been made.
    pub fn run_loop(&self, max_iters: u32, eps: Percent, split: Split, cfg: &BackendConfig) -> Result<LoopOutcome, OrchError> {
        if split != Split::Train {
            return Err(OrchError::Validation("the refinement loop mines exemplars from the train split only".into()));
        }
        if max_iters == 0 {
            return Err(OrchError::Validation("max iterations must be at least 1".into()));
        }
        let _guard = self
            .loop_lock
            .try_lock()
            .map_err(|_| OrchError::Busy("another loop is using this ledger".into()))?;
        let mut records = vec![self.run_evaluation(split, None, cfg)?];
        loop {
            let last = records.last().expect("at least one record");
            if records.len() >= max_iters as usize {
                return Ok(LoopOutcome {
                    records,
                    converged: false,
                    stop_reason: format!("reached {max_iters} iteration(s)"),
                });
            }
            let Some(exemplar) = self.mine_exemplar(last)? else {
                return Ok(LoopOutcome {
                    converged: true,
                    stop_reason: format!("{} has no failures left to correct", last.revision_id),
                    records,
                });
            };
            let index = self.create_revision(&[exemplar], None)?;
            let next = self.run_evaluation(split, Some(index), cfg)?;
            let settled = check_convergence(&last.report, &next.report, eps);
            records.push(next);
            if settled {
                return Ok(LoopOutcome {
                    converged: true,
                    stop_reason: format!("rates moved at most {eps} points"),
                    records,
                });
            }
        }
    }

    /// A pass-rate table over the given runs, in order.
    pub fn report_table(&self, run_ids: &[String]) -> Result<String, OrchError> {
        let runs: Vec<RunRecord> = run_ids.iter().map(|id| self.load_run(id)).collect::<Result<_, _>>()?;
        let labels: Vec<String> = runs.iter().map(|r| format!("{} {}", r.revision_id, r.run_id)).collect();
        let rows: Vec<(&str, &tripwise_core::EvaluationReport)> =
            labels.iter().map(String::as_str).zip(runs.iter().map(|r| &r.report)).collect();
        Ok(render_table(&rows))
    }
}
