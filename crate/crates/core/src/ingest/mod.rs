//! Reference data conversion and parsing, plan text parsing, and query files.

mod plan_text;
mod queries;
mod raw;
mod tables;

use std::path::PathBuf;

use thiserror::Error;

pub use plan_text::{parse_plan, write_plan, ParsedPlanResult};
pub use queries::{read_queries, write_queries};
pub use raw::{convert_reference_to_csv, RawReferenceDocument};
pub use tables::{parse_reference_csv, table_text, write_reference_csv, TABLE_HEADERS};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unknown reference category {0:?}")]
    UnknownCategory(String),
    #[error("malformed {key} block at line {line}: {reason}")]
    MalformedBlock { key: String, line: usize, reason: String },
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing table {0}")]
    MissingTable(String),
    #[error("schema mismatch in {file}: expected `{expected}`, found `{found}`")]
    SchemaMismatch {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{file} line {line}: invalid {column} value {value:?}")]
    InvalidValue {
        file: String,
        line: usize,
        column: String,
        value: String,
    },
    #[error("{file} row {row}: {rule}")]
    InvariantViolation { file: String, row: usize, rule: String },
    #[error("invalid json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::IoFailure {
            path: path.into(),
            source,
        }
    }
}
