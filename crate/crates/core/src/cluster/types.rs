use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::{PaperId, TypeId};

/// Type id given to papers that cannot be placed (no usable features).
pub const UNTYPED: &str = "untyped";

/// A category of practical work with its human-readable semantics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperType {
    pub type_id: TypeId,
    pub description: String,
    pub seed_paper_ids: Vec<PaperId>,
}

impl PaperType {
    pub fn new(type_id: impl Into<TypeId>, description: impl Into<String>, seeds: Vec<PaperId>) -> Result<Self, ClusterError> {
        let type_id = type_id.into();
        let description = description.into();
        if type_id.as_str().trim().is_empty() {
            return Err(ClusterError::EmptyTypeId);
        }
        if description.trim().is_empty() {
            return Err(ClusterError::EmptyDescription(type_id));
        }
        Ok(Self { type_id, description, seed_paper_ids: seeds })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Machine,
    Human,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Machine => "machine",
            Provenance::Human => "human",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machine" => Ok(Provenance::Machine),
            "human" => Ok(Provenance::Human),
            other => Err(format!("unknown provenance '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAssignment {
    pub paper_id: PaperId,
    pub type_id: TypeId,
    pub confidence: f64,
    pub provenance: Provenance,
    /// Store revision that produced the assignment; 0 outside the store.
    #[serde(default)]
    pub revision: u64,
}

impl TypeAssignment {
    pub fn machine(paper_id: PaperId, type_id: TypeId, confidence: f64) -> Self {
        Self { paper_id, type_id, confidence: confidence.clamp(0.0, 1.0), provenance: Provenance::Machine, revision: 0 }
    }

    /// Human assignments always carry full confidence.
    pub fn human(paper_id: PaperId, type_id: TypeId) -> Self {
        Self { paper_id, type_id, confidence: 1.0, provenance: Provenance::Human, revision: 0 }
    }

    pub fn is_untyped(&self) -> bool {
        self.type_id.as_str() == UNTYPED
    }
}
