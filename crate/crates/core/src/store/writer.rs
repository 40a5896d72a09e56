use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use fs2::FileExt;
use serde::{Deserialize, Serialize};

use super::log::{append_record, open_for_append, read_log};
use super::state::MaterializerImage;
use super::{materialize, EditEvent, EditRequest, Materializer, OntologyState, StoreError};
use crate::metadata::PaperExport;
use crate::PaperId;

pub const LOG_FILE: &str = "edits.log";
pub const CATALOG_FILE: &str = "papers.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
const LOCK_FILE: &str = "store.lock";

#[derive(Serialize, Deserialize)]
struct Snapshot {
    revision: u64,
    /// CRC of the record at `revision`, to detect a snapshot from another log.
    record_crc: u32,
    image: MaterializerImage,
}

/// A store directory opened for writing (or, with `open_read_only`, for
/// reading). Only one writer may hold a store at a time.
pub struct Store {
    dir: PathBuf,
    file: Option<File>,
    _lock: Option<File>,
    events: Vec<EditEvent>,
    crcs: Vec<u32>,
    materializer: Materializer,
    published: Arc<OntologyState>,
    papers: Vec<PaperExport>,
    catalog: BTreeSet<PaperId>,
    snapshot_interval: Option<u64>,
    recovered_bytes: u64,
}

impl Store {
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
        let lock_path = dir.join(LOCK_FILE);
        let lock = File::create(&lock_path).map_err(|e| StoreError::io(&lock_path, e))?;
        lock.try_lock_exclusive().map_err(|_| StoreError::Locked(dir.to_owned()))?;
        let mut store = Self::load(dir)?;
        let log_path = dir.join(LOG_FILE);
        let valid_len = read_log(&log_path)?.valid_len;
        store.file = Some(open_for_append(&log_path, valid_len)?);
        store._lock = Some(lock);
        Ok(store)
    }

    /// Reads the store without taking the writer lock; a torn tail is
    /// ignored rather than truncated.
    pub fn open_read_only(dir: &Path) -> Result<Self, StoreError> {
        Self::load(dir)
    }

    fn load(dir: &Path) -> Result<Self, StoreError> {
        let log = read_log(&dir.join(LOG_FILE))?;
        let papers = read_catalog(&dir.join(CATALOG_FILE))?;
        let catalog = papers.iter().map(|p| p.paper_id.clone()).collect();

        let mut materializer = Materializer::default();
        if let Some(snap) = read_snapshot(&dir.join(SNAPSHOT_FILE)) {
            let matches = snap.revision >= 1
                && log.crcs.get(snap.revision as usize - 1) == Some(&snap.record_crc)
                && snap.image.head_revision == snap.revision;
            if matches {
                materializer = Materializer::from_image(snap.image);
            }
        }
        for e in &log.events[materializer.head() as usize..] {
            materializer.apply(e);
        }
        let published = Arc::new(materializer.state().clone());
        Ok(Self {
            dir: dir.to_owned(),
            file: None,
            _lock: None,
            events: log.events,
            crcs: log.crcs,
            materializer,
            published,
            papers,
            catalog,
            snapshot_interval: None,
            recovered_bytes: log.torn_tail,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn head(&self) -> u64 {
        self.materializer.head()
    }

    pub fn state(&self) -> &OntologyState {
        self.materializer.state()
    }

    /// A shared, immutable view of the current state for readers.
    pub fn published(&self) -> Arc<OntologyState> {
        Arc::clone(&self.published)
    }

    pub fn materializer(&self) -> &Materializer {
        &self.materializer
    }

    pub fn events(&self) -> &[EditEvent] {
        &self.events
    }

    pub fn papers(&self) -> &[PaperExport] {
        &self.papers
    }

    pub fn catalog(&self) -> &BTreeSet<PaperId> {
        &self.catalog
    }

    /// Bytes of an interrupted append found when the store was opened.
    pub fn recovered_bytes(&self) -> u64 {
        self.recovered_bytes
    }

    /// Write a snapshot after every `n` appends.
    pub fn set_snapshot_interval(&mut self, n: Option<u64>) {
        self.snapshot_interval = n.filter(|&n| n > 0);
    }

    pub fn state_at(&self, revision: Option<u64>) -> Result<OntologyState, StoreError> {
        match revision {
            None => Ok(self.state().clone()),
            Some(r) if r == self.head() => Ok(self.state().clone()),
            Some(r) => materialize(&self.events, Some(r)),
        }
    }

    /// Replaces the paper catalog edits are validated against.
    pub fn set_catalog(&mut self, papers: Vec<PaperExport>) -> Result<(), StoreError> {
        let path = self.dir.join(CATALOG_FILE);
        let mut text = String::new();
        for p in &papers {
            text.push_str(&serde_json::to_string(p).expect("serializable"));
            text.push('\n');
        }
        write_atomic(&path, text.as_bytes())?;
        self.catalog = papers.iter().map(|p| p.paper_id.clone()).collect();
        self.papers = papers;
        Ok(())
    }

    pub fn append(&mut self, request: EditRequest) -> Result<u64, StoreError> {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64);
        self.append_at(request, now)
    }

    /// Appends with an explicit timestamp. The record is on disk before this
    /// returns.
    pub fn append_at(&mut self, request: EditRequest, timestamp_ms: u64) -> Result<u64, StoreError> {
        let head = self.head();
        if request.expected_revision != head {
            return Err(StoreError::Conflict { expected: request.expected_revision, head });
        }
        self.materializer.validate(&self.catalog, &request)?;
        let Some(file) = self.file.as_mut() else {
            return Err(StoreError::InvalidEdit("store is open read-only".into()));
        };
        let event = EditEvent {
            revision: head + 1,
            timestamp_ms,
            actor: request.actor,
            expected_revision: request.expected_revision,
            action: request.action,
        };
        let crc = append_record(file, &self.dir.join(LOG_FILE), &event)?;
        self.materializer.apply(&event);
        self.events.push(event);
        self.crcs.push(crc);
        self.published = Arc::new(self.materializer.state().clone());
        if let Some(n) = self.snapshot_interval {
            if self.head() % n == 0 {
                self.write_snapshot()?;
            }
        }
        Ok(self.head())
    }

    pub fn write_snapshot(&self) -> Result<(), StoreError> {
        let Some(&record_crc) = self.crcs.last() else { return Ok(()) };
        let snap = Snapshot { revision: self.head(), record_crc, image: self.materializer.to_image() };
        let bytes = serde_json::to_vec(&snap).expect("serializable");
        write_atomic(&self.dir.join(SNAPSHOT_FILE), &bytes)
    }
}

fn read_snapshot(path: &Path) -> Option<Snapshot> {
    let bytes = fs::read(path).ok()?;
    serde_json::from_slice(&bytes).ok()
}

fn read_catalog(path: &Path) -> Result<Vec<PaperExport>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(StoreError::io(path, e)),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| StoreError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let paper = serde_json::from_str(&line)
            .map_err(|e| StoreError::BadExport { line: i + 1, message: format!("{}: {e}", path.display()) })?;
        out.push(paper);
    }
    Ok(out)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| StoreError::io(&tmp, e))?;
    f.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}
