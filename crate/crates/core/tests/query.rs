use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scitype_core::cluster::{KMeansParams, PaperType};
use scitype_core::metadata::{make_dedup_key, PaperExport};
use scitype_core::query::{ApiRequest, Catalog, Retrainer, Service};
use scitype_core::relations::RuleTable;
use scitype_core::store::{Action, Actor, EditRequest, OntologyState, Store};
use scitype_core::text::build_tfidf;
use scitype_core::{PaperId, TypeId};
use scitype_oracles::brute_force_h_index;
use serde_json::{json, Value};

fn export(id: &str, year: i32, author_field: Option<&str>, names: &[&str], cites: &[&str]) -> PaperExport {
    let title = format!("Paper {id}");
    let mut fields = BTreeMap::from([("title".to_owned(), title.clone()), ("year".to_owned(), year.to_string())]);
    if let Some(a) = author_field {
        fields.insert("author".into(), a.into());
    }
    PaperExport {
        paper_id: id.into(),
        dedup_key: make_dedup_key(&title, Some(year)).unwrap(),
        kind: "article".into(),
        fields,
        authors: names.iter().map(|s| s.to_string()).collect(),
        cited_paper_ids: cites.iter().map(|&c| PaperId::from(c)).collect(),
        unresolved_refs: vec![],
    }
}

#[test]
fn h_index_matches_brute_force_on_random_authors() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n_papers = 1200;
    let mut per_author = vec![0usize; 100];
    let mut papers = Vec::new();
    let mut authors_of: Vec<Vec<usize>> = Vec::new();
    for p in 0..n_papers {
        let mut set = BTreeSet::new();
        for _ in 0..rng.random_range(1..=3) {
            let a = rng.random_range(0..100);
            if per_author[a] < 50 && set.insert(a) {
                per_author[a] += 1;
            }
        }
        let cites: BTreeSet<usize> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..n_papers)).filter(|&c| c != p).collect();
        authors_of.push(set.iter().copied().collect());
        papers.push((set, cites));
    }
    let mut received = vec![0usize; n_papers];
    for (_, cites) in &papers {
        for &c in cites {
            received[c] += 1;
        }
    }
    let exports: Vec<PaperExport> = papers
        .iter()
        .enumerate()
        .map(|(p, (set, cites))| {
            let names: Vec<String> = set.iter().map(|a| format!("author {a}")).collect();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let cites: Vec<String> = cites.iter().map(|c| format!("p{c}")).collect();
            let cites: Vec<&str> = cites.iter().map(String::as_str).collect();
            export(&format!("p{p}"), 2000, None, &names, &cites)
        })
        .collect();
    let catalog = Catalog::from_exports(exports);
    let mut checked = 0;
    for a in 0..100 {
        if per_author[a] == 0 {
            continue;
        }
        assert!(per_author[a] <= 50);
        let counts: Vec<usize> =
            (0..n_papers).filter(|p| authors_of[*p].contains(&a)).map(|p| received[p]).collect();
        assert_eq!(catalog.h_index(&format!("author {a}")).unwrap(), brute_force_h_index(&counts), "author {a}");
        checked += 1;
    }
    assert_eq!(checked, 100);
    assert!(catalog.h_index("nobody").is_err());
}

#[test]
fn citation_age_profile_counts() {
    let catalog = Catalog::from_exports([
        export("a", 2010, None, &[], &[]),
        export("b", 2015, None, &[], &["a"]),
        export("c", 2012, None, &[], &["a", "b"]),
    ]);
    let profile = catalog.citation_age_profile();
    assert_eq!(profile.ages, BTreeMap::from([(2, 1), (5, 1)]));
    assert_eq!(profile.anomalous, 1);
}

fn desk() -> Vec<PaperExport> {
    vec![
        export("p1", 2001, Some("Roe, Ann and Vik, Bo"), &["ann roe", "bo vik"], &[]),
        export("p2", 2003, Some("Roe, Ann"), &["ann roe"], &["p1"]),
        export("p3", 2004, Some("Lund, Cy"), &["cy lund"], &["p1"]),
        export("p4", 2006, Some("Lund, Cy and Vik, Bo"), &["cy lund", "bo vik"], &["p3", "p2"]),
    ]
}

fn body(v: Value) -> Vec<u8> {
    serde_json::to_vec(&v).unwrap()
}

fn set_type(actor: &str, expected: u64, paper: &str, t: &str, confidence: f64) -> Vec<u8> {
    body(json!({
        "actor": actor, "expected_revision": expected, "action": "set_type",
        "paper_id": paper, "type_id": t, "confidence": confidence,
    }))
}

fn seeded_store(dir: &std::path::Path) -> Store {
    let mut store = Store::open(dir).unwrap();
    store.set_catalog(desk()).unwrap();
    let steps = [
        Action::CreateType { type_id: "Lab".into(), description: "lab experiments".into() },
        Action::CreateType { type_id: "ML".into(), description: "learning algorithms".into() },
        Action::SetType { paper_id: "p1".into(), type_id: "Lab".into(), confidence: 0.9, suppressed: false },
        Action::SetType { paper_id: "p2".into(), type_id: "Lab".into(), confidence: 0.4, suppressed: false },
        Action::SetType { paper_id: "p3".into(), type_id: "ML".into(), confidence: 0.2, suppressed: false },
        Action::SetType { paper_id: "p4".into(), type_id: "ML".into(), confidence: 0.4, suppressed: false },
    ];
    for action in steps {
        let request = EditRequest { actor: Actor::Machine, expected_revision: store.head(), action };
        store.append(request).unwrap();
    }
    store
}

fn items(v: &Value) -> Vec<Value> {
    v["items"].as_array().unwrap().clone()
}

#[test]
fn authors_with_material_agrees_with_export_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let store = seeded_store(dir.path());
    let catalog = Catalog::from_exports(store.papers().iter().cloned());
    let got = catalog.authors_with_material(store.state(), &TypeId::from("ML")).unwrap();

    let reparsed = OntologyState::parse_export(&store.state().export_text()).unwrap();
    let mut expect: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for p in store.papers() {
        if reparsed.assignments.get(&p.paper_id).is_some_and(|a| a.type_id.as_str() == "ML") {
            for a in &p.authors {
                expect.entry(a.clone()).or_default().insert(p.paper_id.to_string());
            }
        }
    }
    assert_eq!(got.len(), expect.len());
    for r in &got {
        let papers: BTreeSet<String> = r.papers.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(papers, expect[&r.author]);
    }
    assert_eq!(got[0].author, "cy lund");
    assert_eq!(got[0].contact_hint, "Lund, Cy");
    assert!(catalog.authors_with_material(store.state(), &TypeId::from("Nope")).is_err());
}

#[test]
fn scripted_curation_session() {
    let dir = tempfile::tempdir().unwrap();
    let service = Service::new(seeded_store(dir.path())).unwrap();

    let r = service.handle(&ApiRequest::get("/types/Unknown/papers"));
    assert_eq!(r.status, 404);
    assert_eq!(service.handle(&ApiRequest::get("/nowhere")).status, 404);
    assert_eq!(service.handle(&ApiRequest::post("/types", "")).status, 405);

    let types = service.handle(&ApiRequest::get("/types"));
    let names: Vec<_> = items(types.json().unwrap()).iter().map(|t| t["type_id"].clone()).collect();
    assert_eq!(names, [json!("Lab"), json!("ML")]);

    // Low confidence first, ties by paper id; filters narrow the list.
    let q = service.handle(&ApiRequest::get("/queue/low-confidence"));
    let order: Vec<_> = items(q.json().unwrap()).iter().map(|i| i["paper_id"].clone()).collect();
    assert_eq!(order, [json!("p3"), json!("p2"), json!("p4"), json!("p1")]);
    let q = service.handle(&ApiRequest::get("/queue/low-confidence?type=ML&max_confidence=0.3"));
    assert_eq!(items(q.json().unwrap()).len(), 1);
    let q = service.handle(&ApiRequest::get("/queue/low-confidence?limit=2&offset=1"));
    let page = q.json().unwrap();
    assert_eq!(page["total"], 4);
    assert_eq!(items(page)[0]["paper_id"], "p2");

    // Stale writer is told the current head.
    let stale = service.handle(&ApiRequest::post("/edits", set_type("user:ann", 2, "p3", "Lab", 1.0)));
    assert_eq!(stale.status, 409);
    assert_eq!(stale.json().unwrap()["head_revision"], 6);

    // A successful edit is visible to the next read.
    let ok = service.handle(&ApiRequest::post("/edits", set_type("user:ann", 6, "p3", "Lab", 1.0)));
    assert_eq!(ok.status, 200, "{:?}", ok.body);
    assert_eq!(ok.json().unwrap()["revision"], 7);
    let paper = service.handle(&ApiRequest::get("/papers/p3"));
    let paper = paper.json().unwrap();
    assert_eq!(paper["assignment"]["type_id"], "Lab");
    assert_eq!(paper["assignment"]["provenance"], "human");
    assert_eq!(paper["head_revision"], 7);
    let q = service.handle(&ApiRequest::get("/queue/low-confidence"));
    assert!(items(q.json().unwrap()).iter().all(|i| i["paper_id"] != "p3"));

    assert_eq!(service.handle(&ApiRequest::post("/edits", "not json")).status, 400);
    let unknown = service.handle(&ApiRequest::post("/edits", set_type("user:ann", 7, "zz", "Lab", 1.0)));
    assert_eq!(unknown.status, 400);

    // Revision history filtered to one paper.
    let revs = service.handle(&ApiRequest::get("/revisions?paper=p3"));
    let revs: Vec<_> = items(revs.json().unwrap()).iter().map(|e| e["revision"].clone()).collect();
    assert_eq!(revs, [json!(5), json!(7)]);

    let past = service.handle(&ApiRequest::get("/export?at=5"));
    assert_eq!(past.status, 200);
    assert_eq!(service.handle(&ApiRequest::get("/export?at=99")).status, 400);

    let authors = service.handle(&ApiRequest::get("/types/Lab/authors"));
    let first = &items(authors.json().unwrap())[0];
    assert_eq!(first["author"], "ann roe");

    let h = service.handle(&ApiRequest::get("/stats/h-index/ann%20roe"));
    assert_eq!(h.json().unwrap()["h_index"], 1);
    assert_eq!(service.handle(&ApiRequest::get("/stats/h-index/nobody")).status, 404);
    assert_eq!(service.handle(&ApiRequest::get("/lattice")).status, 404);
    assert_eq!(service.handle(&ApiRequest::post("/retrain", "")).status, 404);
}

#[test]
fn restarted_service_answers_identically() {
    let dir = tempfile::tempdir().unwrap();
    let probes = ["/types", "/queue/low-confidence", "/papers/p4", "/revisions", "/types/ML/authors", "/export"];
    let answers = |service: &Service| -> Vec<_> {
        probes.iter().map(|p| service.handle(&ApiRequest::get(p))).collect::<Vec<_>>()
    };
    let before = {
        let service = Service::new(seeded_store(dir.path())).unwrap();
        service.handle(&ApiRequest::post("/edits", set_type("user:bo", 6, "p4", "Lab", 1.0)));
        answers(&service)
    };
    let service = Service::new(Store::open(dir.path()).unwrap()).unwrap();
    assert_eq!(answers(&service), before);
}

#[test]
fn retrain_through_the_router() {
    let dir = tempfile::tempdir().unwrap();
    let store = seeded_store(dir.path());
    let texts = [
        ("p1", "laboratory subjects payoff reciprocity"),
        ("p2", "subjects payoff punishment laboratory"),
        ("p3", "gradient kernel classifier training"),
        ("p4", "kernel training gradient boosting"),
    ];
    let ids: Vec<PaperId> = texts.iter().map(|(p, _)| PaperId::from(*p)).collect();
    let vectors = build_tfidf(ids.iter().zip(texts.iter().map(|(_, t)| *t))).unwrap().vectors;
    let retrainer = Retrainer {
        vectors,
        types: vec![
            PaperType::new("Lab", "lab experiments", vec!["p1".into()]).unwrap(),
            PaperType::new("ML", "learning algorithms", vec!["p3".into()]).unwrap(),
        ],
        params: KMeansParams::default(),
        rules: RuleTable::default_table(),
        citations: vec![("p2".into(), "p1".into()), ("p4".into(), "p3".into()), ("p4".into(), "p2".into())],
        gold: None,
    };
    let service = Service::new(store).unwrap().with_retrainer(retrainer);

    // The curator pins p4 to Lab; retraining must keep it there.
    let r = service.handle(&ApiRequest::post("/edits", set_type("user:cy", 6, "p4", "Lab", 1.0)));
    assert_eq!(r.status, 200);
    let r = service.handle(&ApiRequest::post("/retrain", ""));
    assert_eq!(r.status, 200, "{:?}", r.body);
    let outcome = r.json().unwrap();
    assert_eq!(outcome["human_labels"], 1);
    assert!(outcome["head_revision"].as_u64().unwrap() > 7);

    let state = service.state();
    assert_eq!(state.assignments[&PaperId::from("p4")].type_id.as_str(), "Lab");
    assert_eq!(state.assignments[&PaperId::from("p3")].type_id.as_str(), "ML");
    assert_eq!(state.assignments[&PaperId::from("p2")].type_id.as_str(), "Lab");
    assert_eq!(state.edges.len(), 3);

    // A second retrain with no new feedback changes nothing.
    let again = service.handle(&ApiRequest::post("/retrain", ""));
    assert_eq!(again.json().unwrap()["appended"], 0);
}
