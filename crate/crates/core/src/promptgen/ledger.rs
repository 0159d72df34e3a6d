use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{render_revision, revise_prompt, Exemplar, ExemplarStore, PromptError, PromptRevision, RuleBlock};
use crate::constraints::ManifestEntry;
use crate::metrics::EvaluationReport;
use crate::model::{ReferenceBundle, TravelQuery};

pub const LEDGER_FILE: &str = "ledger.json";

/// The linear chain R0, R1, ... of prompt revisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionLedger {
    revisions: Vec<PromptRevision>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PromptError + '_ {
    move |source| PromptError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), PromptError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

impl RevisionLedger {
    pub fn new(manifest: &[ManifestEntry]) -> Self {
        RevisionLedger {
            revisions: vec![PromptRevision::initial(manifest)],
        }
    }

    pub fn revisions(&self) -> &[PromptRevision] {
        &self.revisions
    }

    pub fn latest(&self) -> &PromptRevision {
        self.revisions.last().expect("ledger always holds R0")
    }

    pub fn get(&self, index: u32) -> Option<&PromptRevision> {
        self.revisions.get(index as usize)
    }

    /// Appends the child of `prev_index`, which must be the latest revision.
    pub fn revise(
        &mut self,
        prev_index: u32,
        new_exemplars: &[Exemplar],
        queries: &[TravelQuery],
        b: &ReferenceBundle,
    ) -> Result<&PromptRevision, PromptError> {
        let latest = self.latest();
        if latest.index != prev_index {
            return Err(PromptError::NotLatest {
                found: prev_index,
                latest: latest.index,
            });
        }
        let next = revise_prompt(latest, new_exemplars, queries, b)?;
        self.revisions.push(next);
        Ok(self.latest())
    }

    /// Replaces the latest revision's rule text. Only allowed before the
    /// revision has been evaluated.
    pub fn set_rule_override(&mut self, index: u32, text: Option<String>) -> Result<(), PromptError> {
        let latest = self.latest().index;
        if index != latest {
            return Err(PromptError::NotLatest { found: index, latest });
        }
        self.revisions[index as usize].rule_override = text;
        Ok(())
    }

    pub fn set_rules(&mut self, index: u32, rules: Vec<RuleBlock>) -> Result<(), PromptError> {
        let r = self
            .revisions
            .get_mut(index as usize)
            .ok_or_else(|| PromptError::BrokenLedger(format!("no revision R{index}")))?;
        r.rules = rules;
        Ok(())
    }

    pub fn set_metrics(&mut self, index: u32, report: EvaluationReport) -> Result<(), PromptError> {
        let r = self
            .revisions
            .get_mut(index as usize)
            .ok_or_else(|| PromptError::BrokenLedger(format!("no revision R{index}")))?;
        r.metrics_snapshot = Some(report);
        Ok(())
    }

    /// Checks the chain shape: one revision per index, each pointing at
    /// its predecessor, R0 without exemplars.
    pub fn validate(&self) -> Result<(), PromptError> {
        let broken = |m: String| Err(PromptError::BrokenLedger(m));
        let Some(first) = self.revisions.first() else {
            return broken("ledger is empty".into());
        };
        if first.parent.is_some() || !first.exemplars.is_empty() {
            return broken("R0 must have no parent and no exemplars".into());
        }
        for (i, r) in self.revisions.iter().enumerate() {
            if r.index as usize != i {
                return broken(format!("revision at position {i} has index {}", r.index));
            }
            if i > 0 && r.parent != Some(i as u32 - 1) {
                return broken(format!("R{i} does not point at R{}", i - 1));
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, PromptError> {
        let path = dir.join(LEDGER_FILE);
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let ledger: RevisionLedger =
            serde_json::from_str(&text).map_err(|source| PromptError::Json { path, source })?;
        ledger.validate()?;
        Ok(ledger)
    }

    /// Writes `ledger.json` and one `R<i>.prompt.txt` per revision.
    pub fn save(&self, dir: &Path, store: &ExemplarStore) -> Result<Vec<PathBuf>, PromptError> {
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for r in &self.revisions {
            let path = dir.join(format!("{}.prompt.txt", r.id()));
            write_atomic(&path, render_revision(r, store)?.as_bytes())?;
            written.push(path);
        }
        let path = dir.join(LEDGER_FILE);
        let json = serde_json::to_string_pretty(self).expect("ledger serializes");
        write_atomic(&path, json.as_bytes())?;
        written.push(path);
        Ok(written)
    }
}
