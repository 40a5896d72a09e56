use proptest::prelude::*;
use scitype_core::text::{
    abstract_histogram, build_tfidf, keyphrase_frequencies, keyphrases, stem, stem_cloud, StemStat,
};
use scitype_core::PaperId;

fn ids(n: usize) -> Vec<PaperId> {
    (0..n).map(|i| PaperId::from(format!("d{i}"))).collect()
}

/// Weights worked out by hand: N = 3, idf(df=2) = ln(4/3) + 1, idf(df=1) = ln 2 + 1,
/// raw counts times idf, then L2 normalization.
#[test]
fn three_document_hand_oracle() {
    let docs = ["trust game trust", "trust lab", "kernel risk risk lab"];
    let ids = ids(3);
    let out = build_tfidf(ids.iter().zip(docs)).unwrap();
    let expected: [&[(&str, f64)]; 3] = [
        &[("trust", 0.8355915419449176), ("game", 0.5493512310263033)],
        &[("trust", 0.7071067811865476), ("lab", 0.7071067811865476)],
        &[("kernel", 0.4233944834119594), ("risk", 0.8467889668239188), ("lab", 0.3220024178194947)],
    ];
    for (id, want) in ids.iter().zip(expected) {
        let v = &out.vectors[id];
        assert_eq!(v.len(), want.len(), "{id}");
        for (term, w) in want {
            assert!((v.weight(term) - w).abs() < 1e-9, "{id} {term}: {} vs {w}", v.weight(term));
        }
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }
    assert_eq!(out.frequencies.df("trust"), 2);
    assert_eq!(out.frequencies.df("kernel"), 1);
}

#[test]
fn single_document_has_unit_idf() {
    let ids = ids(1);
    let out = build_tfidf(ids.iter().zip(["game theory"])).unwrap();
    assert_eq!(out.frequencies.idf("game"), 1.0);
}

#[test]
fn stopword_only_document_is_empty() {
    let ids = ids(2);
    let out = build_tfidf(ids.iter().zip(["the and of", "trust"])).unwrap();
    assert_eq!(out.empty, [ids[0].clone()]);
    assert!(out.vectors[&ids[0]].is_empty());
}

#[test]
fn stemmer_matches_golden_list() {
    let golden = include_str!("data/stems.golden.tsv");
    let mut checked = 0;
    for line in golden.lines().filter(|l| !l.starts_with('#')) {
        let (word, want) = line.split_once('\t').unwrap();
        assert_eq!(stem(word), want, "{word}");
        checked += 1;
    }
    assert!(checked >= 100);
}

#[test]
fn stem_cloud_counts() {
    let stats = stem_cloud(["game game theory", "game"]);
    assert_eq!(stats[0], StemStat { stem: "game".into(), df: 2, tf: 3 });
    assert_eq!(stats[1].df, 1);
}

#[test]
fn histogram_buckets() {
    let a = "x".repeat(250);
    let h = abstract_histogram([a.as_str(), "short"], 100).unwrap();
    assert_eq!(h.buckets.get(&2), Some(&1));
    assert_eq!(h.buckets.get(&0), Some(&1));
    assert!(abstract_histogram(["x"], 0).is_err());
}

#[test]
fn keyphrases_prefer_early_rare_terms() {
    let texts = ["public goods experiment with punishment", "kernel methods", "kernel trick"];
    let df = keyphrase_frequencies(texts);
    let top = keyphrases(texts[0], 3, &df);
    assert_eq!(top.len(), 3);
    assert!(top.windows(2).all(|w| w[0].score >= w[1].score));
}

const WORDS: &[&str] = &[
    "trust", "game", "lab", "kernel", "risk", "the", "of", "experiments", "training", "payoff", "gradient", "and",
];

fn doc() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..12).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn vectors_are_unit_norm_or_empty(docs in prop::collection::vec(doc(), 1..8)) {
        let ids = ids(docs.len());
        let out = build_tfidf(ids.iter().zip(docs.iter().map(String::as_str))).unwrap();
        for (id, v) in &out.vectors {
            if v.is_empty() {
                prop_assert!(out.empty.contains(id));
            } else {
                prop_assert!((v.norm() - 1.0).abs() < 1e-9);
                prop_assert!(v.entries().values().all(|w| *w > 0.0));
            }
        }
        for (term, df) in &out.frequencies.df {
            prop_assert!(*df <= docs.len(), "{term}");
        }
    }

    #[test]
    fn stem_cloud_tf_at_least_df(docs in prop::collection::vec(doc(), 0..8)) {
        let stats = stem_cloud(docs.iter().map(String::as_str));
        for s in &stats {
            prop_assert!(s.tf >= s.df && s.df <= docs.len());
        }
    }

    #[test]
    fn vector_depends_only_on_text_and_frequencies(docs in prop::collection::vec(doc(), 2..6)) {
        let ids = ids(docs.len());
        let out = build_tfidf(ids.iter().zip(docs.iter().map(String::as_str))).unwrap();
        let again = out.frequencies.vectorize(&scitype_core::text::content_stems(&docs[0]));
        prop_assert_eq!(&again, &out.vectors[&ids[0]]);
    }
}
