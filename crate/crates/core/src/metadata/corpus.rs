use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::author::{split_authors, AuthorName};
use super::bibtex::{parse_bibtex_bytes, BibEntry};
use super::dedup::{extract_year, make_dedup_key, DedupKey};
use super::reference::extract_reference;
use super::MetadataError;
use crate::PaperId;

/// One publication with parsed metadata and optional text.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub dedup_key: DedupKey,
    pub metadata: BibEntry,
    pub authors: Vec<AuthorName>,
    pub cited_paper_ids: Vec<PaperId>,
    pub unresolved_refs: Vec<String>,
    pub body_text: Option<String>,
    pub abstract_text: Option<String>,
    /// Cite keys of entries merged into this record, in the order seen.
    pub aliases: Vec<String>,
}

impl PaperRecord {
    /// Builds a record from a single entry; fails when the entry has no title.
    pub fn from_entry(entry: BibEntry) -> Result<Self, MetadataError> {
        let title = entry.field("title").ok_or_else(|| MetadataError::MissingTitle(entry.cite_key.clone()))?;
        let dedup_key = make_dedup_key(title, entry.field("year").and_then(extract_year))
            .map_err(|_| MetadataError::MissingTitle(entry.cite_key.clone()))?;
        let authors = entry.field("author").map(split_authors).unwrap_or_default();
        let abstract_text = entry.field("abstract").filter(|a| !a.trim().is_empty()).map(str::to_owned);
        Ok(Self {
            paper_id: PaperId::new(entry.cite_key.clone()),
            dedup_key,
            aliases: vec![entry.cite_key.clone()],
            metadata: entry,
            authors,
            cited_paper_ids: Vec::new(),
            unresolved_refs: Vec::new(),
            body_text: None,
            abstract_text,
        })
    }

    pub fn title(&self) -> Option<&str> {
        self.metadata.field("title")
    }

    pub fn year(&self) -> Option<i32> {
        self.metadata.field("year").and_then(extract_year)
    }

    pub fn to_export(&self) -> PaperExport {
        PaperExport {
            paper_id: self.paper_id.clone(),
            dedup_key: self.dedup_key.clone(),
            kind: self.metadata.kind.clone(),
            fields: self.metadata.fields.clone(),
            authors: self.authors.iter().map(|a| a.normalized.clone()).collect(),
            cited_paper_ids: self.cited_paper_ids.clone(),
            unresolved_refs: self.unresolved_refs.clone(),
        }
    }

    /// Rebuilds a record from its export line. Text and aliases are not part
    /// of the export and come back empty.
    pub fn from_export(export: PaperExport) -> Self {
        let metadata = BibEntry {
            kind: export.kind,
            cite_key: export.paper_id.to_string(),
            fields: export.fields,
        };
        let authors = match metadata.field("author") {
            Some(field) => split_authors(field),
            None => export.authors.into_iter().map(|n| AuthorName { raw: n.clone(), normalized: n }).collect(),
        };
        Self {
            aliases: vec![export.paper_id.to_string()],
            paper_id: export.paper_id,
            dedup_key: export.dedup_key,
            abstract_text: metadata.field("abstract").map(str::to_owned),
            metadata,
            authors,
            cited_paper_ids: export.cited_paper_ids,
            unresolved_refs: export.unresolved_refs,
            body_text: None,
        }
    }
}

/// One line of `papers.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperExport {
    pub paper_id: PaperId,
    pub dedup_key: DedupKey,
    pub kind: String,
    pub fields: BTreeMap<String, String>,
    pub authors: Vec<String>,
    pub cited_paper_ids: Vec<PaperId>,
    pub unresolved_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeLogEntry {
    pub dedup_key: DedupKey,
    pub kept: String,
    pub merged: String,
    /// Fields whose values differed; the kept record's value won.
    pub conflicts: Vec<String>,
}

impl std::fmt::Display for MergeLogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "merged {} into {} (key {})", self.merged, self.kept, self.dedup_key)?;
        if !self.conflicts.is_empty() {
            write!(f, "; conflicts kept first value: {}", self.conflicts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Ordered by paper id.
    pub records: Vec<PaperRecord>,
    pub warnings: Vec<String>,
    pub merge_log: Vec<MergeLogEntry>,
}

impl Corpus {
    pub fn get(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.records.binary_search_by(|r| r.paper_id.cmp(id)).ok().map(|i| &self.records[i])
    }
}

/// Merges entries sharing a dedup key. Entries are grouped by key with file
/// order kept inside each group, so the first-seen entry wins conflicts.
pub fn merge_entries(entries: Vec<BibEntry>, warnings: &mut Vec<String>) -> (Vec<PaperRecord>, Vec<MergeLogEntry>) {
    let mut groups: BTreeMap<DedupKey, Vec<PaperRecord>> = BTreeMap::new();
    for entry in entries {
        match PaperRecord::from_entry(entry) {
            Ok(record) => groups.entry(record.dedup_key.clone()).or_default().push(record),
            Err(err) => warnings.push(err.to_string()),
        }
    }

    let mut log = Vec::new();
    let mut records = Vec::with_capacity(groups.len());
    for (key, group) in groups {
        let mut iter = group.into_iter();
        let Some(mut kept) = iter.next() else { continue };
        for other in iter {
            let mut conflicts = Vec::new();
            for (name, value) in other.metadata.fields {
                match kept.metadata.fields.get(&name) {
                    Some(existing) if *existing != value => conflicts.push(name),
                    Some(_) => {}
                    None => {
                        kept.metadata.fields.insert(name, value);
                    }
                }
            }
            log.push(MergeLogEntry {
                dedup_key: key.clone(),
                kept: kept.metadata.cite_key.clone(),
                merged: other.metadata.cite_key.clone(),
                conflicts,
            });
            kept.aliases.push(other.metadata.cite_key);
        }
        // Fields may have been filled in by the merge.
        kept.authors = kept.metadata.field("author").map(split_authors).unwrap_or_default();
        if kept.abstract_text.is_none() {
            kept.abstract_text = kept.metadata.field("abstract").map(str::to_owned);
        }
        records.push(kept);
    }
    records.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
    (records, log)
}

/// Resolves raw reference strings against the records' dedup keys.
///
/// A reference resolves to a paper iff the key of its extracted title and
/// year equals that paper's key. Self references and duplicates never become
/// edges; everything that does not resolve stays in `unresolved_refs`.
pub fn resolve_references(records: &mut [PaperRecord]) {
    let by_key: HashMap<DedupKey, PaperId> =
        records.iter().map(|r| (r.dedup_key.clone(), r.paper_id.clone())).collect();
    for record in records.iter_mut() {
        let raw = std::mem::take(&mut record.unresolved_refs);
        for reference in raw {
            let extracted = extract_reference(&reference);
            let target = extracted
                .title
                .and_then(|t| make_dedup_key(&t, extracted.year).ok())
                .and_then(|k| by_key.get(&k));
            match target {
                Some(id) if *id != record.paper_id => {
                    if !record.cited_paper_ids.contains(id) {
                        record.cited_paper_ids.push(id.clone());
                    }
                }
                _ => record.unresolved_refs.push(reference),
            }
        }
        record.cited_paper_ids.sort();
    }
}

/// First blank-line-delimited block of a text.
pub fn first_block(text: &str) -> Option<String> {
    let mut lines = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if lines.is_empty() {
                continue;
            }
            break;
        }
        lines.push(line.trim());
    }
    (!lines.is_empty()).then(|| lines.join(" "))
}

fn read_optional(path: &Path, warnings: &mut Vec<String>) -> Option<String> {
    match fs::read(path) {
        Ok(bytes) => Some(String::from_utf8_lossy(&bytes).into_owned()),
        Err(err) if err.kind() == io::ErrorKind::NotFound => None,
        Err(err) => {
            warnings.push(format!("{}: {err}", path.display()));
            None
        }
    }
}

/// Loads `metadata.bib`, `text/<cite_key>.txt` and `refs/<cite_key>.txt`
/// from a corpus directory.
///
/// Reference files hold one raw reference string per line.
pub fn ingest_corpus(dir: &Path) -> Result<Corpus, MetadataError> {
    let meta_path = dir.join("metadata.bib");
    let bytes = match fs::read(&meta_path) {
        Ok(b) => b,
        Err(err) if err.kind() == io::ErrorKind::NotFound => return Err(MetadataError::NoMetadata(meta_path)),
        Err(err) => return Err(MetadataError::Io { path: meta_path, source: err }),
    };
    let parsed = parse_bibtex_bytes(&bytes);
    let mut warnings: Vec<String> = parsed.warnings.iter().map(|w| format!("metadata.bib: {w}")).collect();
    let (mut records, merge_log) = merge_entries(parsed.entries, &mut warnings);

    for record in &mut records {
        for alias in record.aliases.clone() {
            let text_path = dir.join("text").join(format!("{alias}.txt"));
            if let Some(text) = read_optional(&text_path, &mut warnings) {
                if record.abstract_text.is_none() {
                    record.abstract_text = first_block(&text);
                }
                record.body_text = Some(text);
                break;
            }
        }
        for alias in record.aliases.clone() {
            let refs_path = dir.join("refs").join(format!("{alias}.txt"));
            if let Some(refs) = read_optional(&refs_path, &mut warnings) {
                record
                    .unresolved_refs
                    .extend(refs.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned));
            }
        }
    }
    resolve_references(&mut records);
    Ok(Corpus { records, warnings, merge_log })
}
