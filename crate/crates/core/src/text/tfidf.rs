use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::analyze::content_stems;
use super::{TermVector, TextError};
use crate::PaperId;

/// Document frequencies over a corpus. Partial tables built over disjoint
/// document sets can be merged in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentFrequencies {
    pub n_docs: usize,
    pub df: BTreeMap<String, usize>,
}

impl DocumentFrequencies {
    pub fn add_document<'a>(&mut self, terms: impl IntoIterator<Item = &'a String>) {
        self.n_docs += 1;
        let distinct: BTreeSet<&String> = terms.into_iter().collect();
        for term in distinct {
            *self.df.entry(term.clone()).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: &DocumentFrequencies) {
        self.n_docs += other.n_docs;
        for (term, count) in &other.df {
            *self.df.entry(term.clone()).or_insert(0) += count;
        }
    }

    pub fn df(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    /// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, term: &str) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.df(term) as f64)).ln() + 1.0
    }

    /// Raw term counts times idf, L2-normalized.
    pub fn vectorize(&self, stems: &[String]) -> TermVector {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in stems {
            *counts.entry(s.as_str()).or_insert(0) += 1;
        }
        let weights = counts.into_iter().map(|(t, tf)| (t.to_owned(), tf as f64 * self.idf(t)));
        TermVector::from_weights(weights).expect("tf-idf weights are positive").normalized()
    }
}

#[derive(Debug, Clone)]
pub struct TfidfOutput {
    pub vectors: BTreeMap<PaperId, TermVector>,
    /// Documents with no token left after stopword removal.
    pub empty: Vec<PaperId>,
    pub frequencies: DocumentFrequencies,
}

pub fn build_tfidf<'a, I>(docs: I) -> Result<TfidfOutput, TextError>
where
    I: IntoIterator<Item = (&'a PaperId, &'a str)>,
{
    let stems: Vec<(&PaperId, Vec<String>)> = docs.into_iter().map(|(id, text)| (id, content_stems(text))).collect();
    if stems.is_empty() {
        return Err(TextError::EmptyCorpus);
    }
    let mut frequencies = DocumentFrequencies::default();
    for (_, s) in &stems {
        frequencies.add_document(s);
    }
    let mut vectors = BTreeMap::new();
    let mut empty = Vec::new();
    for (id, s) in stems {
        let v = frequencies.vectorize(&s);
        if v.is_empty() {
            empty.push(id.clone());
        }
        vectors.insert(id.clone(), v);
    }
    empty.sort();
    Ok(TfidfOutput { vectors, empty, frequencies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<PaperId> {
        (0..n).map(|i| PaperId::new(format!("d{i}"))).collect()
    }

    #[test]
    fn single_document_idf_is_one() {
        let id = ids(1);
        let out = build_tfidf([(&id[0], "payoff payoff subject")]).unwrap();
        assert_eq!(out.frequencies.idf("payoff"), 1.0);
        let v = &out.vectors[&id[0]];
        // weights 2 and 1 before normalization
        assert!((v.weight("payoff") - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn term_in_every_document_has_idf_one() {
        let id = ids(3);
        let out = build_tfidf(id.iter().zip(["game alpha", "game beta", "game gamma"])).unwrap();
        assert!((out.frequencies.idf("game") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_documents_are_flagged() {
        let id = ids(2);
        let out = build_tfidf(id.iter().zip(["the and of", "game"])).unwrap();
        assert_eq!(out.empty, vec![id[0].clone()]);
        assert!(out.vectors[&id[0]].is_empty());
    }

    #[test]
    fn no_documents_is_an_error() {
        assert!(matches!(build_tfidf(std::iter::empty()), Err(TextError::EmptyCorpus)));
    }

    #[test]
    fn merge_is_commutative() {
        let mut a = DocumentFrequencies::default();
        a.add_document(&["x".to_string(), "y".to_string()]);
        let mut b = DocumentFrequencies::default();
        b.add_document(&["y".to_string(), "z".to_string(), "y".to_string()]);
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.df("y"), 2);
    }

    proptest! {
        #[test]
        fn vectors_are_unit_norm(docs in proptest::collection::vec("[a-e ]{0,30}", 1..8)) {
            let id = ids(docs.len());
            let texts: Vec<String> = docs.iter().map(|d| d.replace(' ', "x ")).collect();
            let out = build_tfidf(id.iter().zip(texts.iter().map(String::as_str))).unwrap();
            for v in out.vectors.values().filter(|v| !v.is_empty()) {
                prop_assert!((v.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn adding_a_document_never_raises_idf(docs in proptest::collection::vec("[a-f]{2,3}( [a-f]{2,3}){0,5}", 1..6), extra in "[a-f]{2,3}( [a-f]{2,3}){0,5}") {
            let mut freq = DocumentFrequencies::default();
            for d in &docs {
                freq.add_document(&content_stems(d));
            }
            let extra_stems = content_stems(&extra);
            let mut grown = freq.clone();
            grown.add_document(&extra_stems);
            for t in &extra_stems {
                prop_assert!(grown.idf(t) <= freq.idf(t) + 1e-15);
            }
        }
    }
}
