//! Seeded clustering of papers into practical-work types, nearest-centroid
//! classification and the evaluation harness.

use thiserror::Error;

use crate::{PaperId, TypeId};

mod classify;
mod eval;
mod feedback;
mod kmeans;
mod split;
mod types;

pub use classify::classify;
pub use eval::{evaluate, ClusterEvalReport};
pub use feedback::{retrain_with_feedback, FeedbackOutcome};
pub use kmeans::{seeded_kmeans, Centroid, Clustering, KMeansParams};
pub use split::holdout_split;
pub use types::{PaperType, Provenance, TypeAssignment, UNTYPED};

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("seed paper {0} has an empty feature vector")]
    EmptySeedVector(PaperId),
    #[error("need at least two seeded types, got {0}")]
    NeedTwoTypes(usize),
    #[error("seed paper {0} has no feature vector")]
    UnknownSeedPaper(PaperId),
    #[error("type {0} has no seed papers")]
    TypeWithoutSeeds(TypeId),
    #[error("paper {0} is a seed of more than one type")]
    ConflictingSeed(PaperId),
    #[error("type {0} is declared twice")]
    DuplicateType(TypeId),
    #[error("type id must not be empty")]
    EmptyTypeId,
    #[error("type {0} needs a non-empty description")]
    EmptyDescription(TypeId),
    #[error("no centroids to classify against")]
    NoCentroids,
    #[error("gold label for unknown paper {0}")]
    UnknownGoldPaper(PaperId),
    #[error("gold labels must cover at least two papers and two types")]
    InsufficientGold,
    #[error("type {0} has fewer than two seeds and cannot be split")]
    TooFewSeeds(TypeId),
    #[error("holdout fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
}
