//! Queries over the ontology and the request router behind the HTTP service.

use thiserror::Error;

use crate::cluster::ClusterError;
use crate::store::StoreError;
use crate::TypeId;

mod catalog;
mod queue;
mod retrain;
mod service;

pub use catalog::{h_index, AuthorQueryResult, Catalog, CitationAgeProfile, ScientometricReport};
pub use queue::{low_confidence_queue, Candidate, QueueFilter, QueueItem};
pub use retrain::{RetrainOutcome, Retrainer};
pub use service::{
    candidates_text, parse_candidates, ApiRequest, ApiResponse, Body, Method, Service, CANDIDATES_FILE, DEFAULT_LIMIT,
    LATTICE_FILE,
};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("unknown type {0}")]
    UnknownType(TypeId),
    #[error("unknown author '{0}'")]
    UnknownAuthor(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Store(#[from] StoreError),
}
