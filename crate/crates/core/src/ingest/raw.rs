//! Nested reference documents whose values are embedded CSV text.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::tables::{read_loose_block, rows_to_string, table_text};
use super::IngestError;
use crate::model::{Accommodation, Attraction, Flight, GroundRoute, ReferenceBundle, Restaurant, TableKind};

/// A key-to-text map, one CSV block per reference category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawReferenceDocument {
    pub blocks: BTreeMap<TableKind, String>,
}

impl RawReferenceDocument {
    pub fn from_json_str(s: &str) -> Result<Self, IngestError> {
        let map: BTreeMap<String, String> = serde_json::from_str(s).map_err(|e| IngestError::Json {
            path: PathBuf::from("<inline>"),
            source: e,
        })?;
        Self::from_map(map)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, IngestError> {
        let s = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        let map: BTreeMap<String, String> = serde_json::from_str(&s).map_err(|e| IngestError::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<String, String>) -> Result<Self, IngestError> {
        let mut blocks = BTreeMap::new();
        for (k, v) in map {
            let kind = TableKind::from_name(&k).ok_or(IngestError::UnknownCategory(k))?;
            blocks.insert(kind, v);
        }
        Ok(RawReferenceDocument { blocks })
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, &str> = self.blocks.iter().map(|(k, v)| (k.name(), v.as_str())).collect();
        serde_json::to_string_pretty(&map).expect("string map serializes")
    }

    /// Embeds every table of `bundle` as canonical CSV text.
    pub fn from_bundle(bundle: &ReferenceBundle) -> Self {
        RawReferenceDocument {
            blocks: TableKind::ALL
                .into_iter()
                .map(|k| (k, table_text(bundle, k)))
                .collect(),
        }
    }

    /// Parses every present block. Absent categories stay empty.
    pub fn to_bundle(&self) -> Result<ReferenceBundle, IngestError> {
        let mut b = ReferenceBundle::default();
        for (kind, text) in &self.blocks {
            let key = kind.name();
            match kind {
                TableKind::Flights => b.flights = read_loose_block::<Flight>(key, text)?,
                TableKind::Distances => b.distances = read_loose_block::<GroundRoute>(key, text)?,
                TableKind::Accommodations => {
                    b.accommodations = read_loose_block::<Accommodation>(key, text)?
                }
                TableKind::Restaurants => b.restaurants = read_loose_block::<Restaurant>(key, text)?,
                TableKind::Attractions => b.attractions = read_loose_block::<Attraction>(key, text)?,
            }
        }
        Ok(b)
    }
}

/// Writes one canonical `<key>.csv` per block present in `doc`, returning
/// the paths in canonical table order.
pub fn convert_reference_to_csv(doc: &RawReferenceDocument, out_dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let parsed = doc.to_bundle()?;
    fs::create_dir_all(out_dir).map_err(|e| IngestError::io(out_dir, e))?;
    let mut paths = Vec::new();
    for kind in doc.blocks.keys() {
        let text = match kind {
            TableKind::Flights => rows_to_string(&parsed.flights),
            TableKind::Distances => rows_to_string(&parsed.distances),
            TableKind::Accommodations => rows_to_string(&parsed.accommodations),
            TableKind::Restaurants => rows_to_string(&parsed.restaurants),
            TableKind::Attractions => rows_to_string(&parsed.attractions),
        };
        let path = out_dir.join(format!("{}.csv", kind.name()));
        fs::write(&path, text).map_err(|e| IngestError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
