//! Content-addressed artifact store plus a single run index.
//!
//! Layout under the store root:
//!
//! ```text
//! objects/ab/cdef...   one file per artifact, named by its sha256
//! index.json           committed runs, oldest first
//! ```
//!
//! A run shows up in `index.json` only after its record and every artifact
//! it references have been written and synced.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tripwise_core::model::Split;

use crate::record::RunRecord;

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Error)]
pub enum StoreError {
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
    #[error("object {0} is missing or corrupt")]
    Corrupt(String),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub run_id: String,
    /// Hash of the serialized [`RunRecord`].
    pub record: String,
    pub timestamp: DateTime<Utc>,
    pub split: Split,
    pub revision: u32,
}

#[derive(Debug)]
pub struct RunStore {
    root: PathBuf,
    index: Mutex<Vec<IndexEntry>>,
    reserved: Mutex<u64>,
}

/// Writes via a synced temporary file and a rename.
pub fn write_durable(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = File::create(&tmp).map_err(io(&tmp))?;
    f.write_all(bytes).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn hash_of(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunStore {
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(root.join("objects")).map_err(io(root))?;
        let path = root.join(INDEX_FILE);
        let index: Vec<IndexEntry> = if path.exists() {
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            serde_json::from_str(&text).map_err(|source| StoreError::Json { path, source })?
        } else {
            Vec::new()
        };
        let reserved = index
            .iter()
            .filter_map(|e| e.run_id.strip_prefix("run-")?.parse::<u64>().ok())
            .max()
            .unwrap_or(0);
        Ok(RunStore {
            root: root.to_path_buf(),
            index: Mutex::new(index),
            reserved: Mutex::new(reserved),
        })
    }

    fn object_path(&self, hash: &str) -> PathBuf {
        self.root.join("objects").join(&hash[..2]).join(&hash[2..])
    }

    /// Stores `bytes` and returns their hash. Existing objects are kept.
    pub fn put(&self, bytes: &[u8]) -> Result<String, StoreError> {
        let hash = hash_of(bytes);
        let path = self.object_path(&hash);
        if !path.exists() {
            let dir = path.parent().expect("object has a parent");
            fs::create_dir_all(dir).map_err(io(dir))?;
            write_durable(&path, bytes)?;
        }
        Ok(hash)
    }

    pub fn get(&self, hash: &str) -> Result<Vec<u8>, StoreError> {
        if hash.len() < 3 || !hash.bytes().all(|c| c.is_ascii_hexdigit()) {
            return Err(StoreError::Corrupt(hash.to_string()));
        }
        let bytes = fs::read(self.object_path(hash)).map_err(|_| StoreError::Corrupt(hash.to_string()))?;
        if hash_of(&bytes) != hash {
            return Err(StoreError::Corrupt(hash.to_string()));
        }
        Ok(bytes)
    }

    pub fn get_text(&self, hash: &str) -> Result<String, StoreError> {
        String::from_utf8(self.get(hash)?).map_err(|_| StoreError::Corrupt(hash.to_string()))
    }

    /// Hands out the next unused run id.
    pub fn reserve_run_id(&self) -> String {
        let mut n = self.reserved.lock().expect("reservation lock");
        *n += 1;
        format!("run-{:04}", *n)
    }

    /// Stores the record, then publishes it in the index.
    pub fn commit(&self, record: &RunRecord) -> Result<IndexEntry, StoreError> {
        let json = serde_json::to_vec_pretty(record).expect("record serializes");
        let hash = self.put(&json)?;
        let entry = IndexEntry {
            run_id: record.run_id.clone(),
            record: hash,
            timestamp: record.timestamp,
            split: record.split,
            revision: record.revision,
        };
        let mut index = self.index.lock().expect("index lock");
        let mut next = index.clone();
        next.retain(|e| e.run_id != entry.run_id);
        next.push(entry.clone());
        let text = serde_json::to_vec_pretty(&next).expect("index serializes");
        write_durable(&self.root.join(INDEX_FILE), &text)?;
        *index = next;
        Ok(entry)
    }

    pub fn list(&self) -> Vec<IndexEntry> {
        self.index.lock().expect("index lock").clone()
    }

    pub fn entry(&self, run_id: &str) -> Option<IndexEntry> {
        self.list().into_iter().find(|e| e.run_id == run_id)
    }

    pub fn load(&self, run_id: &str) -> Result<Option<RunRecord>, StoreError> {
        let Some(e) = self.entry(run_id) else {
            return Ok(None);
        };
        let bytes = self.get(&e.record)?;
        serde_json::from_slice(&bytes).map(Some).map_err(|source| StoreError::Json {
            path: self.object_path(&e.record),
            source,
        })
    }
}
