use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Catalog;
use crate::cluster::Provenance;
use crate::store::OntologyState;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub type_id: TypeId,
    pub similarity: f64,
}

/// A machine assignment awaiting review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueItem {
    pub paper_id: PaperId,
    pub title: String,
    pub abstract_snippet: String,
    pub type_id: TypeId,
    pub confidence: f64,
    /// Most similar types first.
    pub candidates: Vec<Candidate>,
    pub head_revision: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueueFilter {
    pub type_id: Option<TypeId>,
    /// Keep only items at or below this confidence.
    pub max_confidence: Option<f64>,
}

const SNIPPET_CHARS: usize = 200;

fn snippet(text: &str) -> String {
    let mut out: String = text.chars().take(SNIPPET_CHARS).collect();
    if text.chars().count() > SNIPPET_CHARS {
        out.push('…');
    }
    out
}

/// Machine assignments ordered by ascending confidence, then paper id.
pub fn low_confidence_queue(
    state: &OntologyState,
    catalog: &Catalog,
    candidates: &BTreeMap<PaperId, Vec<Candidate>>,
    filter: &QueueFilter,
) -> Vec<QueueItem> {
    let mut items: Vec<QueueItem> = state
        .assignments
        .values()
        .filter(|a| a.provenance == Provenance::Machine)
        .filter(|a| filter.type_id.as_ref().is_none_or(|t| &a.type_id == t))
        .filter(|a| filter.max_confidence.is_none_or(|m| a.confidence <= m))
        .map(|a| {
            let record = catalog.get(&a.paper_id);
            let mut ranked = candidates.get(&a.paper_id).cloned().unwrap_or_default();
            ranked.sort_by(|x, y| y.similarity.total_cmp(&x.similarity).then_with(|| x.type_id.cmp(&y.type_id)));
            QueueItem {
                paper_id: a.paper_id.clone(),
                title: record.and_then(|r| r.title()).unwrap_or_default().to_owned(),
                abstract_snippet: record.and_then(|r| r.abstract_text.as_deref()).map(snippet).unwrap_or_default(),
                type_id: a.type_id.clone(),
                confidence: a.confidence,
                candidates: ranked,
                head_revision: state.head_revision,
            }
        })
        .collect();
    items.sort_by(|a, b| a.confidence.total_cmp(&b.confidence).then_with(|| a.paper_id.cmp(&b.paper_id)));
    items
}
