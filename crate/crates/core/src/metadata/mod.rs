//! Bibliographic metadata: BibTeX parsing, author normalization, dedup keys,
//! reference resolution and corpus ingest.

use std::path::PathBuf;

use thiserror::Error;

pub mod author;
pub mod bibtex;
pub mod corpus;
pub mod dedup;
pub mod reference;

pub use author::{normalize_author, split_authors, AuthorName};
pub use bibtex::{parse_bibtex, parse_bibtex_bytes, write_bibtex, BibEntry, ParseOutcome, ParseWarning, WarningKind};
pub use corpus::{ingest_corpus, resolve_references, Corpus, MergeLogEntry, PaperExport, PaperRecord};
pub use dedup::{extract_year, make_dedup_key, normalize_title, DedupKey};
pub use reference::{extract_reference, ExtractedReference};

#[derive(Debug, Error)]
pub enum MetadataError {
    #[error("author name is empty")]
    EmptyName,
    #[error("title is empty after normalization")]
    EmptyTitle,
    #[error("entry '{0}' has no usable title")]
    MissingTitle(String),
    #[error("metadata file not found: {0}")]
    NoMetadata(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
