//! The ontology store: an append-only, checksummed edit log with optimistic
//! concurrency, deterministic materialization, reverts and snapshots.

use std::path::{Path, PathBuf};

use thiserror::Error;

mod bulk;
mod event;
mod log;
mod state;
mod writer;

pub use bulk::{bulk_load_machine_results, human_seed_export, import_state, BulkLoadReport, SeedRow};
pub use event::{Action, Actor, EditEvent, EditRequest};
pub use log::{decode_log, encode_record, read_log, DecodedLog};
pub use state::{materialize, Materializer, OntologyState, PreImage, StoredEdge, TypeRecord};
pub use writer::{Store, CATALOG_FILE, LOG_FILE, SNAPSHOT_FILE};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("stale edit: expected revision {expected}, head is {head}")]
    Conflict { expected: u64, head: u64 },
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
    #[error("log record for revision {0} is corrupt")]
    CorruptLog(u64),
    #[error("revision {requested} is beyond head {head}")]
    RevisionOutOfRange { requested: u64, head: u64 },
    #[error("store at {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("malformed state export line {line}: {message}")]
    BadExport { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl StoreError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_owned(), source }
    }
}
