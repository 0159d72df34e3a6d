use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PromptError;
use crate::constraints::descriptor;
use crate::ingest::ParsedPlanResult;
use crate::model::{Plan, ReferenceBundle, TravelQuery};

/// A failed plan paired with a correction that fixes the named constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    /// Content hash of the other fields.
    pub id: String,
    pub query_id: String,
    pub failed_plan: ParsedPlanResult,
    pub failed_constraints: Vec<String>,
    pub corrected_plan: Plan,
    pub author_note: String,
}

#[derive(Serialize)]
struct Content<'a> {
    query_id: &'a str,
    failed_plan: &'a ParsedPlanResult,
    failed_constraints: &'a [String],
    corrected_plan: &'a Plan,
    author_note: &'a str,
}

impl Exemplar {
    pub fn new(
        query_id: impl Into<String>,
        failed_plan: ParsedPlanResult,
        failed_constraints: Vec<String>,
        corrected_plan: Plan,
        author_note: impl Into<String>,
    ) -> Self {
        let mut e = Exemplar {
            id: String::new(),
            query_id: query_id.into(),
            failed_plan,
            failed_constraints,
            corrected_plan,
            author_note: author_note.into(),
        };
        e.id = e.content_hash();
        e
    }

    fn content_hash(&self) -> String {
        let json = serde_json::to_vec(&Content {
            query_id: &self.query_id,
            failed_plan: &self.failed_plan,
            failed_constraints: &self.failed_constraints,
            corrected_plan: &self.corrected_plan,
            author_note: &self.author_note,
        })
        .expect("exemplar content serializes");
        let digest = Sha256::digest(&json);
        format!("ex-{}", &hex::encode(digest)[..16])
    }

    /// Checks that the corrected plan passes every listed constraint.
    pub fn verify(&self, q: &TravelQuery, b: &ReferenceBundle) -> Result<(), PromptError> {
        if q.id != self.query_id {
            return Err(PromptError::UnknownQuery(self.query_id.clone()));
        }
        let mut failing = Vec::new();
        for id in &self.failed_constraints {
            let d = descriptor(id).ok_or_else(|| PromptError::UnknownConstraint(id.clone()))?;
            if d.evaluate(&self.corrected_plan, q, b).failed() {
                failing.push(id.clone());
            }
        }
        if failing.is_empty() {
            Ok(())
        } else {
            Err(PromptError::ExemplarInvariantViolation {
                exemplar_id: self.id.clone(),
                failing,
            })
        }
    }
}

/// Exemplars by id, persisted as one JSON file each.
#[derive(Debug, Clone, Default)]
pub struct ExemplarStore {
    items: BTreeMap<String, Exemplar>,
}

impl ExemplarStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: Exemplar) -> String {
        let id = e.id.clone();
        self.items.insert(id.clone(), e);
        id
    }

    pub fn get(&self, id: &str) -> Option<&Exemplar> {
        self.items.get(id)
    }

    pub fn resolve(&self, id: &str) -> Result<&Exemplar, PromptError> {
        self.get(id).ok_or_else(|| PromptError::UnknownExemplar(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Exemplar> {
        self.items.values()
    }

    pub fn load(dir: &Path) -> Result<Self, PromptError> {
        let mut store = ExemplarStore::new();
        if !dir.exists() {
            return Ok(store);
        }
        let entries = fs::read_dir(dir).map_err(|source| PromptError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for entry in entries {
            let path = entry
                .map_err(|source| PromptError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?
                .path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|source| PromptError::Io {
                path: path.clone(),
                source,
            })?;
            let e: Exemplar = serde_json::from_str(&text).map_err(|source| PromptError::Json {
                path: path.clone(),
                source,
            })?;
            store.insert(e);
        }
        Ok(store)
    }

    /// Writes one exemplar to `dir/<id>.json`.
    pub fn save_one(dir: &Path, e: &Exemplar) -> Result<(), PromptError> {
        fs::create_dir_all(dir).map_err(|source| PromptError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(format!("{}.json", e.id));
        let json = serde_json::to_string_pretty(e).expect("exemplar serializes");
        fs::write(&path, json).map_err(|source| PromptError::Io { path, source })
    }
}
