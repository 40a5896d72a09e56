use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;

use proptest::prelude::*;
use scitype_core::cluster::{PaperType, Provenance, TypeAssignment};
use scitype_core::metadata::{make_dedup_key, PaperExport};
use scitype_core::relations::{CitationEdge, CitationType};
use scitype_core::store::*;
use scitype_core::{PaperId, TypeId};

fn paper(id: &str) -> PaperExport {
    PaperExport {
        paper_id: id.into(),
        dedup_key: make_dedup_key(&format!("Paper {id}"), None).unwrap(),
        kind: "article".into(),
        fields: BTreeMap::from([("title".to_owned(), format!("Paper {id}"))]),
        authors: vec![],
        cited_paper_ids: vec![],
        unresolved_refs: vec![],
    }
}

fn fresh(papers: &[&str]) -> (tempfile::TempDir, Store) {
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path()).unwrap();
    store.set_catalog(papers.iter().map(|p| paper(p)).collect()).unwrap();
    (dir, store)
}

fn req(store: &Store, actor: Actor, action: Action) -> EditRequest {
    EditRequest { actor, expected_revision: store.head(), action }
}

fn create(store: &mut Store, t: &str) -> u64 {
    let r = req(store, Actor::Machine, Action::CreateType { type_id: t.into(), description: format!("{t} papers") });
    store.append_at(r, 0).unwrap()
}

fn set(store: &mut Store, actor: Actor, p: &str, t: &str, c: f64) -> Result<u64, StoreError> {
    let r = req(store, actor, Action::SetType { paper_id: p.into(), type_id: t.into(), confidence: c, suppressed: false });
    store.append_at(r, 0)
}

#[test]
fn first_edit_is_revision_one() {
    let (_d, mut store) = fresh(&["a"]);
    assert_eq!(store.head(), 0);
    assert_eq!(create(&mut store, "T"), 1);
    assert!(store.state().types.contains_key(&TypeId::from("T")));
}

#[test]
fn stale_writer_gets_conflict_with_head() {
    let (_d, mut store) = fresh(&["a"]);
    create(&mut store, "T");
    let a = EditRequest {
        actor: Actor::user("ana"),
        expected_revision: 1,
        action: Action::SetType { paper_id: "a".into(), type_id: "T".into(), confidence: 1.0, suppressed: false },
    };
    let b = EditRequest { actor: Actor::user("bo"), ..a.clone() };
    assert_eq!(store.append_at(a, 0).unwrap(), 2);
    match store.append_at(b, 0) {
        Err(StoreError::Conflict { expected: 1, head: 2 }) => {}
        other => panic!("{other:?}"),
    }
    assert_eq!(store.head(), 2);
}

#[test]
fn invalid_edits_are_rejected() {
    let (_d, mut store) = fresh(&["a", "b"]);
    create(&mut store, "T");
    assert!(matches!(set(&mut store, Actor::Machine, "zz", "T", 0.5), Err(StoreError::InvalidEdit(_))));
    assert!(matches!(set(&mut store, Actor::Machine, "a", "Nope", 0.5), Err(StoreError::InvalidEdit(_))));
    assert!(matches!(set(&mut store, Actor::Machine, "a", "T", 1.5), Err(StoreError::InvalidEdit(_))));
    let r = req(&store, Actor::Machine, Action::Revert { target: 9 });
    assert!(matches!(store.append_at(r, 0), Err(StoreError::InvalidEdit(_))));
    let r = req(&store, Actor::Machine, Action::Revert { target: 1 });
    assert!(matches!(store.append_at(r, 0), Err(StoreError::InvalidEdit(_))), "create_type is not revertible");
    let r = req(&store, Actor::Machine, Action::CreateType { type_id: "T".into(), description: "again".into() });
    assert!(matches!(store.append_at(r, 0), Err(StoreError::InvalidEdit(_))));
    let r = req(
        &store,
        Actor::Machine,
        Action::SetCitationType {
            from_paper_id: "a".into(),
            to_paper_id: "a".into(),
            citation_type: CitationType::Insight,
            rule_id: "x".into(),
        },
    );
    assert!(matches!(store.append_at(r, 0), Err(StoreError::InvalidEdit(_))));
    assert_eq!(store.head(), 1);
}

#[test]
fn revert_restores_the_pre_image() {
    let (_d, mut store) = fresh(&["a"]);
    create(&mut store, "T");
    create(&mut store, "U");
    set(&mut store, Actor::Machine, "a", "T", 0.4).unwrap();
    let human = set(&mut store, Actor::user("ana"), "a", "U", 0.0).unwrap();
    let a = &store.state().assignments[&PaperId::from("a")];
    assert_eq!((a.type_id.as_str(), a.provenance, a.confidence), ("U", Provenance::Human, 1.0));

    let r = req(&store, Actor::user("bo"), Action::Revert { target: human });
    let revert = store.append_at(r, 0).unwrap();
    let a = &store.state().assignments[&PaperId::from("a")];
    assert_eq!((a.type_id.as_str(), a.provenance, a.confidence), ("T", Provenance::Machine, 0.4));

    // Reverting the revert puts the human label back.
    let r = req(&store, Actor::user("ana"), Action::Revert { target: revert });
    store.append_at(r, 0).unwrap();
    assert_eq!(store.state().assignments[&PaperId::from("a")].provenance, Provenance::Human);

    // Reverting the first assignment removes it entirely.
    let r = req(&store, Actor::user("ana"), Action::Revert { target: 3 });
    store.append_at(r, 0).unwrap();
    assert!(store.state().assignments.get(&PaperId::from("a")).is_none());
}

#[test]
fn empty_log_is_empty_state() {
    assert_eq!(materialize(&[], None).unwrap(), OntologyState::default());
    assert!(matches!(materialize(&[], Some(1)), Err(StoreError::RevisionOutOfRange { requested: 1, head: 0 })));
}

#[test]
fn reopen_replays_to_the_same_state() {
    let (dir, mut store) = fresh(&["a", "b"]);
    create(&mut store, "T");
    set(&mut store, Actor::Machine, "a", "T", 0.3).unwrap();
    set(&mut store, Actor::user("ana"), "b", "T", 1.0).unwrap();
    let before = store.state().clone();
    drop(store);
    let again = Store::open(dir.path()).unwrap();
    assert_eq!(again.state(), &before);
    assert_eq!(again.papers().len(), 2);
}

#[test]
fn second_writer_is_locked_out() {
    let (dir, _store) = fresh(&[]);
    assert!(matches!(Store::open(dir.path()), Err(StoreError::Locked(_))));
    assert!(Store::open_read_only(dir.path()).is_ok());
}

#[test]
fn torn_tail_is_truncated_on_open() {
    let (dir, mut store) = fresh(&["a"]);
    create(&mut store, "T");
    set(&mut store, Actor::Machine, "a", "T", 0.5).unwrap();
    drop(store);
    let log = dir.path().join(LOG_FILE);
    let intact = std::fs::metadata(&log).unwrap().len();
    OpenOptions::new().append(true).open(&log).unwrap().write_all(&[0, 0, 0, 40, b'{']).unwrap();

    let ro = Store::open_read_only(dir.path()).unwrap();
    assert_eq!(ro.head(), 2);
    assert_eq!(ro.recovered_bytes(), 5);
    drop(ro);
    let mut store = Store::open(dir.path()).unwrap();
    assert_eq!(std::fs::metadata(&log).unwrap().len(), intact);
    assert_eq!(set(&mut store, Actor::Machine, "a", "T", 0.6).unwrap(), 3);
}

#[test]
fn flipped_byte_is_corrupt_log() {
    let (dir, mut store) = fresh(&["a"]);
    create(&mut store, "T");
    set(&mut store, Actor::Machine, "a", "T", 0.5).unwrap();
    drop(store);
    let log = dir.path().join(LOG_FILE);
    let mut bytes = std::fs::read(&log).unwrap();
    let n = bytes.len();
    bytes[n - 10] ^= 0x01;
    std::fs::write(&log, bytes).unwrap();
    assert!(matches!(Store::open(dir.path()), Err(StoreError::CorruptLog(2))));
}

#[test]
fn snapshot_resumes_to_identical_state() {
    let (dir, mut store) = fresh(&["a", "b"]);
    store.set_snapshot_interval(Some(2));
    create(&mut store, "T");
    set(&mut store, Actor::Machine, "a", "T", 0.5).unwrap();
    set(&mut store, Actor::user("x"), "a", "T", 1.0).unwrap();
    let r = req(&store, Actor::Machine, Action::Revert { target: 3 });
    store.append_at(r, 0).unwrap();
    set(&mut store, Actor::Machine, "b", "T", 0.2).unwrap();
    let expected = store.state().clone();
    drop(store);
    assert!(dir.path().join(SNAPSHOT_FILE).exists());
    let again = Store::open(dir.path()).unwrap();
    assert_eq!(again.state(), &expected);
    assert_eq!(again.materializer(), &{
        let mut m = Materializer::default();
        again.events().iter().for_each(|e| m.apply(e));
        m
    });
}

fn machine_types() -> Vec<PaperType> {
    vec![PaperType::new("A", "type a", vec![]).unwrap(), PaperType::new("B", "type b", vec![]).unwrap()]
}

#[test]
fn bulk_load_is_idempotent_and_respects_humans() {
    let (_d, mut store) = fresh(&["p1", "p2", "p3"]);
    let ms = vec![
        TypeAssignment::machine("p1".into(), "A".into(), 0.5),
        TypeAssignment::machine("p2".into(), "A".into(), 0.2),
        TypeAssignment::machine("p3".into(), "B".into(), 0.9),
    ];
    let edges = vec![CitationEdge {
        from_paper_id: "p1".into(),
        to_paper_id: "p3".into(),
        citation_type: CitationType::Unknown,
        rule_id: "default".into(),
    }];
    let first = bulk_load_machine_results(&mut store, &machine_types(), &ms, &edges).unwrap();
    assert_eq!(first.appended, 2 + 3 + 1);
    let rerun = bulk_load_machine_results(&mut store, &machine_types(), &ms, &edges).unwrap();
    assert_eq!(rerun, BulkLoadReport { appended: 0, suppressed: 0, unchanged: 4 });

    set(&mut store, Actor::user("ana"), "p2", "B", 1.0).unwrap();
    let head = store.head();
    let again = bulk_load_machine_results(&mut store, &machine_types(), &ms, &edges).unwrap();
    assert_eq!((again.appended, again.suppressed), (1, 1));
    let a = &store.state().assignments[&PaperId::from("p2")];
    assert_eq!((a.type_id.as_str(), a.provenance), ("B", Provenance::Human));
    match &store.events()[head as usize].action {
        Action::SetType { suppressed: true, .. } => {}
        other => panic!("{other:?}"),
    }
    // The same disagreement is not annotated twice.
    let quiet = bulk_load_machine_results(&mut store, &machine_types(), &ms, &edges).unwrap();
    assert_eq!(quiet.appended, 0);
}

#[test]
fn human_seeds_group_by_type() {
    let (_d, mut store) = fresh(&["p1", "p2", "p3", "p4"]);
    create(&mut store, "A");
    create(&mut store, "B");
    assert!(human_seed_export(store.state()).is_empty());
    set(&mut store, Actor::Machine, "p4", "A", 0.3).unwrap();
    set(&mut store, Actor::user("u"), "p3", "B", 1.0).unwrap();
    set(&mut store, Actor::user("u"), "p1", "A", 1.0).unwrap();
    set(&mut store, Actor::user("v"), "p2", "B", 1.0).unwrap();
    let rows: Vec<(String, String)> =
        human_seed_export(store.state()).into_iter().map(|r| (r.type_id.to_string(), r.paper_id.to_string())).collect();
    assert_eq!(rows, [("A".into(), "p1".into()), ("B".into(), "p2".into()), ("B".into(), "p3".into())]);
}

#[test]
fn export_then_import_preserves_the_hash() {
    let (_d, mut store) = fresh(&["p1", "p2"]);
    create(&mut store, "A");
    set(&mut store, Actor::Machine, "p1", "A", 0.25).unwrap();
    set(&mut store, Actor::user("u"), "p2", "A", 1.0).unwrap();
    let text = store.state().export_text();
    let parsed = OntologyState::parse_export(&text).unwrap();
    assert_eq!(&parsed, store.state());

    let (_d2, mut other) = fresh(&["p1", "p2"]);
    import_state(&mut other, &parsed).unwrap();
    assert_eq!(other.state().content_hash(), store.state().content_hash());
    assert_ne!(other.head(), 0);
}

#[derive(Debug, Clone)]
enum Op {
    Machine(usize, usize, u8),
    Human(usize, usize),
    Revert(u64),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..4usize, 0..3usize, 0..10u8).prop_map(|(p, t, c)| Op::Machine(p, t, c)),
        (0..4usize, 0..3usize).prop_map(|(p, t)| Op::Human(p, t)),
        (1..40u64).prop_map(Op::Revert),
    ]
}

const PAPERS: [&str; 4] = ["p0", "p1", "p2", "p3"];
const TYPES: [&str; 3] = ["A", "B", "C"];

/// Drives the materializer directly; the fold is what these properties are
/// about and the disk path is covered above.
fn run_ops(ops: &[Op]) -> (Vec<EditEvent>, Materializer) {
    let catalog = PAPERS.iter().map(|p| PaperId::from(*p)).collect();
    let mut m = Materializer::default();
    let mut events = Vec::new();
    let mut push = |m: &mut Materializer, actor: Actor, action: Action| {
        let request = EditRequest { actor, expected_revision: m.head(), action };
        if m.validate(&catalog, &request).is_ok() {
            let event = EditEvent {
                revision: m.head() + 1,
                timestamp_ms: 0,
                actor: request.actor,
                expected_revision: request.expected_revision,
                action: request.action,
            };
            m.apply(&event);
            events.push(event);
        }
    };
    for t in TYPES {
        push(&mut m, Actor::Machine, Action::CreateType { type_id: t.into(), description: "d".into() });
    }
    for op in ops {
        let action = match op {
            Op::Machine(p, t, c) => Action::SetType {
                paper_id: PAPERS[*p].into(),
                type_id: TYPES[*t].into(),
                confidence: f64::from(*c) / 10.0,
                suppressed: false,
            },
            Op::Human(p, t) => {
                Action::SetType { paper_id: PAPERS[*p].into(), type_id: TYPES[*t].into(), confidence: 1.0, suppressed: false }
            }
            Op::Revert(r) => Action::Revert { target: *r },
        };
        let actor = if matches!(op, Op::Human(..)) { Actor::user("h") } else { Actor::Machine };
        push(&mut m, actor, action);
    }
    (events, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prefix_materialization_matches_truncated_log(ops in proptest::collection::vec(op(), 0..30)) {
        let (events, m) = run_ops(&ops);
        for r in 0..=m.head() {
            let truncated = &events[..r as usize];
            prop_assert_eq!(materialize(&events, Some(r)).unwrap(), materialize(truncated, None).unwrap());
        }
        prop_assert_eq!(&materialize(&events, None).unwrap(), m.state());
    }

    #[test]
    fn latest_human_edit_wins_over_machine_loads(
        ops in proptest::collection::vec(op().prop_filter("no reverts", |o| !matches!(o, Op::Revert(_))), 0..30)
    ) {
        let (_, m) = run_ops(&ops);
        let mut last_human: BTreeMap<usize, usize> = BTreeMap::new();
        for op in &ops {
            if let Op::Human(p, t) = op {
                last_human.insert(*p, *t);
            }
        }
        for (p, t) in last_human {
            let a = &m.state().assignments[&PaperId::from(PAPERS[p])];
            prop_assert_eq!(a.type_id.as_str(), TYPES[t]);
            prop_assert_eq!(a.provenance, Provenance::Human);
        }
    }
}
