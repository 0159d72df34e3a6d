//! Query files: one JSON object per line.

use std::fs;
use std::path::{Path, PathBuf};

use super::IngestError;
use crate::model::TravelQuery;

pub fn read_queries(path: &Path) -> Result<Vec<TravelQuery>, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|e| IngestError::Json {
                path: PathBuf::from(path),
                source: e,
            })
        })
        .collect()
}

pub fn write_queries(path: &Path, queries: &[TravelQuery]) -> Result<(), IngestError> {
    let mut out = String::new();
    for q in queries {
        out.push_str(&serde_json::to_string(q).expect("queries serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| IngestError::io(path, e))
}
