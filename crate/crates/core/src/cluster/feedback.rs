use std::collections::BTreeMap;

use super::{evaluate, seeded_kmeans, ClusterError, ClusterEvalReport, Clustering, KMeansParams, PaperType, Provenance, TypeAssignment};
use crate::text::TermVector;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackOutcome {
    pub clustering: Clustering,
    /// One assignment per vector; human labels are returned untouched.
    pub assignments: Vec<TypeAssignment>,
    /// Seed sets the rerun used, including curator-introduced types.
    pub types: Vec<PaperType>,
    pub report: Option<ClusterEvalReport>,
}

/// Folds human labels into the seed sets and reruns the clustering.
///
/// A human label moves its paper into that type's seeds (and out of any other
/// type's). Types that only curators know about are created with a generic
/// description. Papers whose vector is empty keep their human label but cannot
/// act as seeds.
pub fn retrain_with_feedback(
    vectors: &BTreeMap<PaperId, TermVector>,
    types: &[PaperType],
    human: &[TypeAssignment],
    params: &KMeansParams,
    gold: Option<&BTreeMap<PaperId, TypeId>>,
) -> Result<FeedbackOutcome, ClusterError> {
    let human: BTreeMap<&PaperId, &TypeAssignment> = human
        .iter()
        .filter(|a| a.provenance == Provenance::Human)
        .map(|a| (&a.paper_id, a))
        .collect();

    let mut seeds: BTreeMap<TypeId, (String, Vec<PaperId>)> = types
        .iter()
        .map(|t| {
            let kept = t.seed_paper_ids.iter().filter(|p| !human.contains_key(p)).cloned().collect();
            (t.type_id.clone(), (t.description.clone(), kept))
        })
        .collect();
    for (paper, a) in &human {
        if a.is_untyped() || vectors.get(*paper).is_none_or(TermVector::is_empty) {
            continue;
        }
        seeds
            .entry(a.type_id.clone())
            .or_insert_with(|| (format!("curator-defined type {}", a.type_id), Vec::new()))
            .1
            .push((*paper).clone());
    }
    let types: Vec<PaperType> = seeds
        .into_iter()
        .map(|(type_id, (description, seed_paper_ids))| PaperType { type_id, description, seed_paper_ids })
        .collect();

    let clustering = seeded_kmeans(vectors, &types, params)?;
    let assignments: Vec<TypeAssignment> = clustering
        .to_assignments(vectors)
        .into_iter()
        .map(|a| match human.get(&a.paper_id) {
            Some(h) => (*h).clone(),
            None => a,
        })
        .collect();
    let report = match gold {
        Some(gold) => {
            let current: BTreeMap<PaperId, TypeId> =
                assignments.iter().map(|a| (a.paper_id.clone(), a.type_id.clone())).collect();
            Some(evaluate(&current, gold)?)
        }
        None => None,
    };
    Ok(FeedbackOutcome { clustering, assignments, types, report })
}
