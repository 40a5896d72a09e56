use std::collections::BTreeMap;

use serde::Serialize;

use super::QueryError;
use crate::cluster::{retrain_with_feedback, ClusterEvalReport, KMeansParams, PaperType, Provenance, TypeAssignment};
use crate::relations::{type_citations, RuleTable};
use crate::store::{bulk_load_machine_results, BulkLoadReport, Store};
use crate::text::TermVector;
use crate::{PaperId, TypeId};

/// Everything needed to rerun clustering with the store's human labels and
/// write the result back.
#[derive(Debug, Clone)]
pub struct Retrainer {
    pub vectors: BTreeMap<PaperId, TermVector>,
    pub types: Vec<PaperType>,
    pub params: KMeansParams,
    pub rules: RuleTable,
    pub citations: Vec<(PaperId, PaperId)>,
    pub gold: Option<BTreeMap<PaperId, TypeId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrainOutcome {
    pub human_labels: usize,
    pub report: Option<ClusterEvalReport>,
    pub appended: usize,
    pub suppressed: usize,
    pub unchanged: usize,
    pub head_revision: u64,
}

impl Retrainer {
    pub fn run(&self, store: &mut Store) -> Result<RetrainOutcome, QueryError> {
        let human: Vec<TypeAssignment> =
            store.state().assignments.values().filter(|a| a.provenance == Provenance::Human).cloned().collect();
        let outcome = retrain_with_feedback(&self.vectors, &self.types, &human, &self.params, self.gold.as_ref())?;
        let current: BTreeMap<PaperId, TypeId> =
            outcome.assignments.iter().map(|a| (a.paper_id.clone(), a.type_id.clone())).collect();
        let edges = type_citations(&self.citations, &current, &self.rules);
        let machine: Vec<TypeAssignment> =
            outcome.assignments.into_iter().filter(|a| a.provenance == Provenance::Machine).collect();
        let BulkLoadReport { appended, suppressed, unchanged } =
            bulk_load_machine_results(store, &outcome.types, &machine, &edges)?;
        Ok(RetrainOutcome {
            human_labels: human.len(),
            report: outcome.report,
            appended,
            suppressed,
            unchanged,
            head_revision: store.head(),
        })
    }
}
