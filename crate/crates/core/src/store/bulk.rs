use serde_json::Value;

use super::{Action, Actor, EditRequest, OntologyState, Store, StoreError, StoredEdge, TypeRecord};
use crate::cluster::{PaperType, Provenance, TypeAssignment};
use crate::relations::CitationEdge;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BulkLoadReport {
    /// Events written, suppressed annotations included.
    pub appended: usize,
    /// Machine proposals recorded but not applied because a human label holds.
    pub suppressed: usize,
    pub unchanged: usize,
}

fn machine(store: &mut Store, action: Action) -> Result<u64, StoreError> {
    let expected_revision = store.head();
    store.append(EditRequest { actor: Actor::Machine, expected_revision, action })
}

/// Writes pipeline output into the store as machine edits. Facts that did
/// not change produce no event. A proposal that disagrees with a human label
/// is logged as a suppressed annotation, once per human edit, and never
/// applied.
pub fn bulk_load_machine_results(
    store: &mut Store,
    types: &[PaperType],
    assignments: &[TypeAssignment],
    edges: &[CitationEdge],
) -> Result<BulkLoadReport, StoreError> {
    let mut report = BulkLoadReport::default();
    for t in types {
        if !store.state().types.contains_key(&t.type_id) {
            machine(store, Action::CreateType { type_id: t.type_id.clone(), description: t.description.clone() })?;
            report.appended += 1;
        }
    }
    for a in assignments {
        let current = store.state().assignments.get(&a.paper_id);
        let suppressed = match current {
            Some(h) if h.provenance == Provenance::Human => {
                let noted = store
                    .materializer()
                    .machine_proposal(&a.paper_id)
                    .is_some_and(|(t, c, r)| t == &a.type_id && *c == a.confidence && *r > h.revision);
                if h.type_id == a.type_id || noted {
                    report.unchanged += 1;
                    continue;
                }
                true
            }
            Some(m) if m.type_id == a.type_id && m.confidence == a.confidence => {
                report.unchanged += 1;
                continue;
            }
            _ => false,
        };
        machine(
            store,
            Action::SetType { paper_id: a.paper_id.clone(), type_id: a.type_id.clone(), confidence: a.confidence, suppressed },
        )?;
        report.appended += 1;
        report.suppressed += usize::from(suppressed);
    }
    for e in edges {
        let key = (e.from_paper_id.clone(), e.to_paper_id.clone());
        let same = match store.state().edges.get(&key) {
            Some(s) if s.provenance == Provenance::Human => true,
            Some(s) => s.citation_type == e.citation_type && s.rule_id == e.rule_id,
            None => false,
        };
        if same {
            report.unchanged += 1;
            continue;
        }
        machine(
            store,
            Action::SetCitationType {
                from_paper_id: e.from_paper_id.clone(),
                to_paper_id: e.to_paper_id.clone(),
                citation_type: e.citation_type,
                rule_id: e.rule_id.clone(),
            },
        )?;
        report.appended += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRow {
    pub type_id: TypeId,
    pub description: String,
    pub paper_id: PaperId,
}

/// Human labels as seed rows, ordered by type then paper.
pub fn human_seed_export(state: &OntologyState) -> Vec<SeedRow> {
    let mut rows = Vec::new();
    for (type_id, papers) in state.human_seeds() {
        let description = state.types.get(type_id).map_or_else(|| type_id.to_string(), |t| t.description.clone());
        for p in papers {
            rows.push(SeedRow { type_id: type_id.clone(), description: description.clone(), paper_id: p.clone() });
        }
    }
    rows
}

const IMPORT_USER: &str = "import";

impl OntologyState {
    /// Parses the output of [`OntologyState::export_text`].
    pub fn parse_export(text: &str) -> Result<Self, StoreError> {
        let mut state = OntologyState::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| StoreError::BadExport { line: i + 1, message };
            let mut value: Value = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            let kind = value
                .as_object_mut()
                .and_then(|o| o.remove("kind"))
                .and_then(|k| k.as_str().map(str::to_owned))
                .ok_or_else(|| bad("missing 'kind'".into()))?;
            match kind.as_str() {
                "head" => {
                    state.head_revision =
                        value.get("head_revision").and_then(Value::as_u64).ok_or_else(|| bad("missing head_revision".into()))?;
                }
                "type" => {
                    let t: TypeRecord = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
                    state.types.insert(t.type_id.clone(), t);
                }
                "assignment" => {
                    let a: TypeAssignment = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
                    state.assignments.insert(a.paper_id.clone(), a);
                }
                "edge" => {
                    let e: StoredEdge = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
                    state.edges.insert((e.from_paper_id.clone(), e.to_paper_id.clone()), e);
                }
                other => return Err(bad(format!("unknown kind '{other}'"))),
            }
        }
        Ok(state)
    }
}

/// Replays an exported state into `store` as fresh edits. Human facts are
/// attributed to `user:import`.
pub fn import_state(store: &mut Store, state: &OntologyState) -> Result<usize, StoreError> {
    let mut appended = 0;
    let actor_for = |p: Provenance| match p {
        Provenance::Machine => Actor::Machine,
        Provenance::Human => Actor::user(IMPORT_USER),
    };
    let mut push = |store: &mut Store, actor: Actor, action: Action| -> Result<(), StoreError> {
        let expected_revision = store.head();
        store.append(EditRequest { actor, expected_revision, action })?;
        appended += 1;
        Ok(())
    };
    for t in state.types.values() {
        if !store.state().types.contains_key(&t.type_id) {
            push(store, Actor::Machine, Action::CreateType { type_id: t.type_id.clone(), description: t.description.clone() })?;
        }
    }
    for a in state.assignments.values() {
        let action = Action::SetType {
            paper_id: a.paper_id.clone(),
            type_id: a.type_id.clone(),
            confidence: a.confidence,
            suppressed: false,
        };
        push(store, actor_for(a.provenance), action)?;
    }
    for e in state.edges.values() {
        let action = Action::SetCitationType {
            from_paper_id: e.from_paper_id.clone(),
            to_paper_id: e.to_paper_id.clone(),
            citation_type: e.citation_type,
            rule_id: e.rule_id.clone(),
        };
        push(store, actor_for(e.provenance), action)?;
    }
    Ok(appended)
}
