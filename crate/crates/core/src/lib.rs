//! Typing scientific papers by the kind of practical work behind them.
//!
//! The crate is organised as a pipeline of independent stages:
//!
//! * [`metadata`] parses noisy BibTeX, normalizes authors and resolves
//!   reference strings into a citation graph.
//! * [`text`] turns abstracts or body text into TF-IDF vectors, keyphrases
//!   and descriptive corpus statistics.
//! * [`cluster`] runs seeded, constrained k-means over those vectors and
//!   scores the result against held-out manual labels.
//! * [`relations`] types citations by rule, counts co-citation and
//!   co-authorship, and builds a formal concept lattice.
//! * [`store`] keeps the resulting ontology in an append-only, checksummed
//!   edit log with wiki-style revisions and reverts.
//! * [`query`] answers read queries and accepts edits over that store.
//!
//! [`formats`] holds the tab-separated and line-delimited JSON artifacts
//! that connect the stages on disk.

pub mod cluster;
pub mod formats;
pub mod ids;
pub mod metadata;
pub mod query;
pub mod relations;
pub mod store;
pub mod text;

pub use ids::{PaperId, TypeId};
