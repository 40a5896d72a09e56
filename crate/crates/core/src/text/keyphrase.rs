//! Unsupervised keyphrase scoring: tf-idf damped by how late a candidate
//! first occurs. Candidates are stems and adjacent stem pairs that are not
//! separated by a stopword.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::analyze::stem_runs;
use super::DocumentFrequencies;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyphrase {
    pub phrase: String,
    pub score: f64,
}

struct Candidate {
    count: usize,
    first: usize,
}

/// Unigram and bigram candidates of a text with counts and first positions.
/// Positions index the stopword-free stem sequence.
fn candidates(text: &str) -> (BTreeMap<String, Candidate>, usize) {
    let mut out: BTreeMap<String, Candidate> = BTreeMap::new();
    let mut pos = 0;
    let mut note = |phrase: String, at: usize| {
        out.entry(phrase).and_modify(|c| c.count += 1).or_insert(Candidate { count: 1, first: at });
    };
    for run in stem_runs(text) {
        for (i, s) in run.iter().enumerate() {
            note(s.clone(), pos + i);
            if let Some(next) = run.get(i + 1) {
                note(format!("{s} {next}"), pos + i);
            }
        }
        pos += run.len();
    }
    (out, pos)
}

/// Candidate phrases of one document, for building frequency tables.
pub fn candidate_phrases(text: &str) -> Vec<String> {
    candidates(text).0.into_keys().collect()
}

/// Document frequencies over unigram and bigram candidates.
pub fn keyphrase_frequencies<'a>(texts: impl IntoIterator<Item = &'a str>) -> DocumentFrequencies {
    let mut freq = DocumentFrequencies::default();
    for text in texts {
        freq.add_document(&candidate_phrases(text));
    }
    freq
}

/// Top `k` candidates by `tf * idf * (1 - first_position / length)`, ties
/// broken by phrase.
pub fn keyphrases(text: &str, k: usize, frequencies: &DocumentFrequencies) -> Vec<Keyphrase> {
    let (cands, len) = candidates(text);
    if len == 0 || k == 0 {
        return Vec::new();
    }
    let mut scored: Vec<Keyphrase> = cands
        .into_iter()
        .map(|(phrase, c)| {
            let position = 1.0 - c.first as f64 / len as f64;
            let score = c.count as f64 * frequencies.idf(&phrase) * position;
            Keyphrase { phrase, score }
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.phrase.cmp(&b.phrase)));
    scored.truncate(k);
    scored
}
