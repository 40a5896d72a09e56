use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Action, Actor, EditEvent, EditRequest, StoreError};
use crate::cluster::{Provenance, TypeAssignment, UNTYPED};
use crate::relations::CitationType;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRecord {
    pub type_id: TypeId,
    pub description: String,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredEdge {
    pub from_paper_id: PaperId,
    pub to_paper_id: PaperId,
    pub citation_type: CitationType,
    pub rule_id: String,
    pub provenance: Provenance,
    pub revision: u64,
}

/// The ontology as of `head_revision`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OntologyState {
    pub head_revision: u64,
    pub types: BTreeMap<TypeId, TypeRecord>,
    pub assignments: BTreeMap<PaperId, TypeAssignment>,
    pub edges: BTreeMap<(PaperId, PaperId), StoredEdge>,
}

impl OntologyState {
    /// Human assignments grouped by type: the seed sets for retraining.
    pub fn human_seeds(&self) -> BTreeMap<&TypeId, Vec<&PaperId>> {
        let mut out: BTreeMap<&TypeId, Vec<&PaperId>> = BTreeMap::new();
        for a in self.assignments.values() {
            if a.provenance == Provenance::Human && !a.is_untyped() {
                out.entry(&a.type_id).or_default().push(&a.paper_id);
            }
        }
        out
    }

    /// One JSON object per line: types, then assignments, then edges, each in
    /// key order. Revisions are included only when asked for, so two states
    /// reached by different histories can still compare equal.
    pub fn canonical_lines(&self, with_revisions: bool) -> Vec<String> {
        let mut lines = Vec::new();
        let strip = |mut v: serde_json::Value| {
            if !with_revisions {
                v.as_object_mut().expect("object").remove("revision");
            }
            v
        };
        for t in self.types.values() {
            let mut v = strip(serde_json::to_value(t).expect("serializable"));
            v.as_object_mut().unwrap().insert("kind".into(), "type".into());
            lines.push(v.to_string());
        }
        for a in self.assignments.values() {
            let mut v = strip(serde_json::to_value(a).expect("serializable"));
            v.as_object_mut().unwrap().insert("kind".into(), "assignment".into());
            lines.push(v.to_string());
        }
        for e in self.edges.values() {
            let mut v = strip(serde_json::to_value(e).expect("serializable"));
            v.as_object_mut().unwrap().insert("kind".into(), "edge".into());
            lines.push(v.to_string());
        }
        lines
    }

    /// Full export: a header line with the head revision, then every fact.
    pub fn export_text(&self) -> String {
        let mut out = serde_json::json!({ "kind": "head", "head_revision": self.head_revision }).to_string();
        out.push('\n');
        for line in self.canonical_lines(true) {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// SHA-256 over the revision-free canonical lines.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for line in self.canonical_lines(false) {
            h.update(line.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// Value of one fact just before an event changed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum PreImage {
    Assignment { paper_id: PaperId, value: Option<TypeAssignment> },
    Edge { from_paper_id: PaperId, to_paper_id: PaperId, value: Option<StoredEdge> },
}

/// Incremental left fold of the edit log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Materializer {
    state: OntologyState,
    /// Keyed by the revision of every event that changed a fact.
    pre_images: BTreeMap<u64, PreImage>,
    /// Latest machine proposal per paper, applied or not, with its revision.
    machine_proposals: BTreeMap<PaperId, (TypeId, f64, u64)>,
}

#[derive(Serialize, Deserialize)]
pub(super) struct MaterializerImage {
    pub(super) head_revision: u64,
    types: Vec<TypeRecord>,
    assignments: Vec<TypeAssignment>,
    edges: Vec<StoredEdge>,
    pre_images: Vec<(u64, PreImage)>,
    machine_proposals: Vec<(PaperId, TypeId, f64, u64)>,
}

impl Materializer {
    pub fn state(&self) -> &OntologyState {
        &self.state
    }

    pub fn head(&self) -> u64 {
        self.state.head_revision
    }

    pub fn machine_proposal(&self, paper: &PaperId) -> Option<&(TypeId, f64, u64)> {
        self.machine_proposals.get(paper)
    }

    /// Whether reverting `revision` would change anything.
    pub fn is_revertible(&self, revision: u64) -> bool {
        self.pre_images.contains_key(&revision)
    }

    pub fn apply(&mut self, event: &EditEvent) {
        debug_assert_eq!(event.revision, self.state.head_revision + 1);
        let rev = event.revision;
        self.state.head_revision = rev;
        let provenance = event.actor.provenance();
        match &event.action {
            Action::SetType { paper_id, type_id, confidence, suppressed } => {
                if provenance == Provenance::Machine {
                    self.machine_proposals.insert(paper_id.clone(), (type_id.clone(), *confidence, rev));
                    let human_held =
                        self.state.assignments.get(paper_id).is_some_and(|a| a.provenance == Provenance::Human);
                    if *suppressed || human_held {
                        return;
                    }
                }
                let mut assignment = match provenance {
                    Provenance::Machine => TypeAssignment::machine(paper_id.clone(), type_id.clone(), *confidence),
                    Provenance::Human => TypeAssignment::human(paper_id.clone(), type_id.clone()),
                };
                assignment.revision = rev;
                let previous = self.state.assignments.insert(paper_id.clone(), assignment);
                self.pre_images.insert(rev, PreImage::Assignment { paper_id: paper_id.clone(), value: previous });
            }
            Action::SetCitationType { from_paper_id, to_paper_id, citation_type, rule_id } => {
                let key = (from_paper_id.clone(), to_paper_id.clone());
                if provenance == Provenance::Machine
                    && self.state.edges.get(&key).is_some_and(|e| e.provenance == Provenance::Human)
                {
                    return;
                }
                let edge = StoredEdge {
                    from_paper_id: from_paper_id.clone(),
                    to_paper_id: to_paper_id.clone(),
                    citation_type: *citation_type,
                    rule_id: rule_id.clone(),
                    provenance,
                    revision: rev,
                };
                let previous = self.state.edges.insert(key, edge);
                self.pre_images.insert(
                    rev,
                    PreImage::Edge { from_paper_id: from_paper_id.clone(), to_paper_id: to_paper_id.clone(), value: previous },
                );
            }
            Action::CreateType { type_id, description } => {
                self.state.types.entry(type_id.clone()).or_insert_with(|| TypeRecord {
                    type_id: type_id.clone(),
                    description: description.clone(),
                    revision: rev,
                });
            }
            Action::Revert { target } => {
                let Some(pre) = self.pre_images.get(target).cloned() else { return };
                let undo = match pre {
                    PreImage::Assignment { paper_id, value } => {
                        let previous = match value {
                            Some(mut a) => {
                                a.revision = rev;
                                self.state.assignments.insert(paper_id.clone(), a)
                            }
                            None => self.state.assignments.remove(&paper_id),
                        };
                        PreImage::Assignment { paper_id, value: previous }
                    }
                    PreImage::Edge { from_paper_id, to_paper_id, value } => {
                        let key = (from_paper_id.clone(), to_paper_id.clone());
                        let previous = match value {
                            Some(mut e) => {
                                e.revision = rev;
                                self.state.edges.insert(key, e)
                            }
                            None => self.state.edges.remove(&key),
                        };
                        PreImage::Edge { from_paper_id, to_paper_id, value: previous }
                    }
                };
                self.pre_images.insert(rev, undo);
            }
        }
    }

    /// Checks a request against the current state and the paper catalog.
    pub fn validate(&self, catalog: &BTreeSet<PaperId>, request: &EditRequest) -> Result<(), StoreError> {
        let invalid = |m: String| Err(StoreError::InvalidEdit(m));
        if let Actor::User(name) = &request.actor {
            if name.trim().is_empty() {
                return invalid("actor name is empty".into());
            }
        }
        match &request.action {
            Action::SetType { paper_id, type_id, confidence, suppressed } => {
                if !catalog.contains(paper_id) {
                    return invalid(format!("unknown paper {paper_id}"));
                }
                if type_id.as_str() != UNTYPED && !self.state.types.contains_key(type_id) {
                    return invalid(format!("unknown type {type_id}"));
                }
                if !(0.0..=1.0).contains(confidence) {
                    return invalid(format!("confidence {confidence} outside [0, 1]"));
                }
                if *suppressed && request.actor != Actor::Machine {
                    return invalid("only machine proposals can be suppressed".into());
                }
            }
            Action::SetCitationType { from_paper_id, to_paper_id, rule_id, .. } => {
                for p in [from_paper_id, to_paper_id] {
                    if !catalog.contains(p) {
                        return invalid(format!("unknown paper {p}"));
                    }
                }
                if from_paper_id == to_paper_id {
                    return invalid("a paper cannot cite itself".into());
                }
                if rule_id.trim().is_empty() {
                    return invalid("rule id is empty".into());
                }
            }
            Action::CreateType { type_id, description } => {
                if type_id.as_str().trim().is_empty() || type_id.as_str() == UNTYPED {
                    return invalid(format!("'{type_id}' is not a usable type id"));
                }
                if description.trim().is_empty() {
                    return invalid(format!("type {type_id} needs a description"));
                }
                if self.state.types.contains_key(type_id) {
                    return invalid(format!("type {type_id} already exists"));
                }
            }
            Action::Revert { target } => {
                if *target == 0 || *target > self.state.head_revision {
                    return invalid(format!("revision {target} does not exist"));
                }
                if !self.is_revertible(*target) {
                    return invalid(format!("revision {target} changed nothing that can be reverted"));
                }
            }
        }
        Ok(())
    }

    pub(super) fn to_image(&self) -> MaterializerImage {
        MaterializerImage {
            head_revision: self.state.head_revision,
            types: self.state.types.values().cloned().collect(),
            assignments: self.state.assignments.values().cloned().collect(),
            edges: self.state.edges.values().cloned().collect(),
            pre_images: self.pre_images.iter().map(|(r, p)| (*r, p.clone())).collect(),
            machine_proposals: self.machine_proposals.iter().map(|(p, (t, c, r))| (p.clone(), t.clone(), *c, *r)).collect(),
        }
    }

    pub(super) fn from_image(image: MaterializerImage) -> Self {
        let state = OntologyState {
            head_revision: image.head_revision,
            types: image.types.into_iter().map(|t| (t.type_id.clone(), t)).collect(),
            assignments: image.assignments.into_iter().map(|a| (a.paper_id.clone(), a)).collect(),
            edges: image
                .edges
                .into_iter()
                .map(|e| ((e.from_paper_id.clone(), e.to_paper_id.clone()), e))
                .collect(),
        };
        Self {
            state,
            pre_images: image.pre_images.into_iter().collect(),
            machine_proposals: image.machine_proposals.into_iter().map(|(p, t, c, r)| (p, (t, c, r))).collect(),
        }
    }
}

/// State after folding `events` up to `at` (default: all of them).
pub fn materialize(events: &[EditEvent], at: Option<u64>) -> Result<OntologyState, StoreError> {
    let head = events.len() as u64;
    let at = at.unwrap_or(head);
    if at > head {
        return Err(StoreError::RevisionOutOfRange { requested: at, head });
    }
    let mut m = Materializer::default();
    for e in &events[..at as usize] {
        m.apply(e);
    }
    Ok(m.state)
}
