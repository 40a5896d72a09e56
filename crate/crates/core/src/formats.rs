//! Readers and writers for the pipeline's plain-text artifacts.
//!
//! TSV artifacts start with a `# rng_seed=N` comment (where a seed applies)
//! and a column header. Readers skip `#` lines and a leading header row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::cluster::{ClusterError, PaperType, Provenance, TypeAssignment};
use crate::metadata::PaperExport;
use crate::query::Candidate;
use crate::relations::{CitationEdge, Concept, FormalContext};
use crate::store::SeedRow;
use crate::text::{AbstractLengthHistogram, Keyphrase, StemStat, TermVector};
use crate::{PaperId, TypeId};

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

fn line_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line { line, message: message.into() }
}

/// Data rows of a TSV text with their 1-based line numbers.
fn rows<'a>(text: &'a str, header_first: &'a str) -> impl Iterator<Item = (usize, Vec<&'a str>)> + 'a {
    let mut seen_data = false;
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !seen_data && cols[0] == header_first {
            seen_data = true;
            return None;
        }
        seen_data = true;
        Some((i + 1, cols))
    })
}

fn expect_cols(line: usize, cols: &[&str], n: usize) -> Result<(), FormatError> {
    if cols.len() == n {
        Ok(())
    } else {
        Err(line_err(line, format!("expected {n} tab-separated columns, got {}", cols.len())))
    }
}

fn seed_header(rng_seed: Option<u64>) -> String {
    rng_seed.map_or_else(String::new, |s| format!("# rng_seed={s}\n"))
}

/// Reads the `# rng_seed=N` header of an artifact, if present.
pub fn read_rng_seed(text: &str) -> Option<u64> {
    text.lines().take_while(|l| l.starts_with('#')).find_map(|l| l.strip_prefix("# rng_seed=")?.trim().parse().ok())
}

/// `type_id, description, paper_id` rows grouped into types, in order of
/// first appearance.
pub fn parse_seeds(text: &str) -> Result<Vec<PaperType>, FormatError> {
    let mut order: Vec<TypeId> = Vec::new();
    let mut by_type: BTreeMap<TypeId, (String, Vec<PaperId>)> = BTreeMap::new();
    for (line, cols) in rows(text, "type_id") {
        expect_cols(line, &cols, 3)?;
        let (t, desc, paper) = (cols[0].trim(), cols[1].trim(), cols[2].trim());
        if paper.is_empty() {
            return Err(line_err(line, "empty paper id"));
        }
        let type_id = TypeId::from(t);
        let entry = by_type.entry(type_id.clone()).or_insert_with(|| {
            order.push(type_id.clone());
            (desc.to_owned(), Vec::new())
        });
        if entry.0 != desc {
            return Err(line_err(line, format!("type {t} has two descriptions")));
        }
        if !entry.1.iter().any(|p| p.as_str() == paper) {
            entry.1.push(paper.into());
        }
    }
    order
        .into_iter()
        .map(|t| {
            let (desc, seeds) = by_type.remove(&t).expect("present");
            PaperType::new(t, desc, seeds).map_err(FormatError::from)
        })
        .collect()
}

pub fn write_seeds(types: &[PaperType]) -> String {
    let mut out = String::from("type_id\tdescription\tpaper_id\n");
    for t in types {
        for p in &t.seed_paper_ids {
            let _ = writeln!(out, "{}\t{}\t{}", t.type_id, t.description, p);
        }
    }
    out
}

pub fn write_seed_rows(rows: &[SeedRow]) -> String {
    let mut out = String::from("type_id\tdescription\tpaper_id\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}", r.type_id, r.description, r.paper_id);
    }
    out
}

pub fn write_assignments(assignments: &[TypeAssignment], rng_seed: Option<u64>) -> String {
    let mut out = seed_header(rng_seed);
    out.push_str("paper_id\ttype_id\tconfidence\tprovenance\n");
    for a in assignments {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", a.paper_id, a.type_id, a.confidence, a.provenance);
    }
    out
}

pub fn parse_assignments(text: &str) -> Result<Vec<TypeAssignment>, FormatError> {
    rows(text, "paper_id")
        .map(|(line, cols)| {
            expect_cols(line, &cols, 4)?;
            let confidence: f64 = cols[2].parse().map_err(|_| line_err(line, format!("bad confidence '{}'", cols[2])))?;
            let provenance: Provenance = cols[3].parse().map_err(|e: String| line_err(line, e))?;
            let a = match provenance {
                Provenance::Machine => TypeAssignment::machine(cols[0].into(), cols[1].into(), confidence),
                Provenance::Human => TypeAssignment::human(cols[0].into(), cols[1].into()),
            };
            Ok(a)
        })
        .collect()
}

pub fn write_edges(edges: &[CitationEdge], rng_seed: Option<u64>) -> String {
    let mut out = seed_header(rng_seed);
    out.push_str("from\tto\tcitation_type\trule_id\n");
    for e in edges {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.from_paper_id, e.to_paper_id, e.citation_type, e.rule_id);
    }
    out
}

pub fn parse_edges(text: &str) -> Result<Vec<CitationEdge>, FormatError> {
    rows(text, "from")
        .map(|(line, cols)| {
            expect_cols(line, &cols, 4)?;
            Ok(CitationEdge {
                from_paper_id: cols[0].into(),
                to_paper_id: cols[1].into(),
                citation_type: cols[2].parse().map_err(|e: String| line_err(line, e))?,
                rule_id: cols[3].to_owned(),
            })
        })
        .collect()
}

pub fn write_gold(gold: &BTreeMap<PaperId, TypeId>, rng_seed: Option<u64>) -> String {
    let mut out = seed_header(rng_seed);
    out.push_str("paper_id\ttype_id\n");
    for (p, t) in gold {
        let _ = writeln!(out, "{p}\t{t}");
    }
    out
}

pub fn parse_gold(text: &str) -> Result<BTreeMap<PaperId, TypeId>, FormatError> {
    let mut out = BTreeMap::new();
    for (line, cols) in rows(text, "paper_id") {
        expect_cols(line, &cols, 2)?;
        if out.insert(PaperId::from(cols[0]), TypeId::from(cols[1])).is_some() {
            return Err(line_err(line, format!("paper {} labelled twice", cols[0])));
        }
    }
    Ok(out)
}

pub fn write_stems(stats: &[StemStat]) -> String {
    let mut out = String::from("stem\tdf\ttf\n");
    for s in stats {
        let _ = writeln!(out, "{}\t{}\t{}", s.stem, s.df, s.tf);
    }
    out
}

pub fn write_histogram(h: &AbstractLengthHistogram) -> String {
    let mut out = String::from("bucket_start\tcount\n");
    for (start, count) in h.rows() {
        let _ = writeln!(out, "{start}\t{count}");
    }
    out
}

fn write_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("serializable"));
        out.push('\n');
    }
    out
}

fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| line_err(i + 1, e.to_string())))
        .collect()
}

pub fn write_papers(papers: &[PaperExport]) -> String {
    write_jsonl(papers)
}

pub fn parse_papers(text: &str) -> Result<Vec<PaperExport>, FormatError> {
    parse_jsonl(text)
}

/// Text regions kept beside `papers.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperText {
    pub paper_id: PaperId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_text: Option<String>,
}

pub fn write_texts(texts: &[PaperText]) -> String {
    write_jsonl(texts)
}

pub fn parse_texts(text: &str) -> Result<Vec<PaperText>, FormatError> {
    parse_jsonl(text)
}

#[derive(Serialize, Deserialize)]
struct VectorLine {
    paper_id: PaperId,
    weights: TermVector,
}

pub fn write_vectors(vectors: &BTreeMap<PaperId, TermVector>) -> String {
    write_jsonl(vectors.iter().map(|(p, v)| json!({ "paper_id": p, "weights": v })))
}

pub fn parse_vectors(text: &str) -> Result<BTreeMap<PaperId, TermVector>, FormatError> {
    Ok(parse_jsonl::<VectorLine>(text)?.into_iter().map(|l| (l.paper_id, l.weights)).collect())
}

#[derive(Serialize, Deserialize)]
struct KeyphraseLine {
    paper_id: PaperId,
    keyphrases: Vec<Keyphrase>,
}

pub fn write_keyphrases(keyphrases: &BTreeMap<PaperId, Vec<Keyphrase>>) -> String {
    write_jsonl(keyphrases.iter().map(|(p, k)| json!({ "paper_id": p, "keyphrases": k })))
}

pub fn parse_keyphrases(text: &str) -> Result<BTreeMap<PaperId, Vec<Keyphrase>>, FormatError> {
    Ok(parse_jsonl::<KeyphraseLine>(text)?.into_iter().map(|l| (l.paper_id, l.keyphrases)).collect())
}

pub use crate::query::{candidates_text as write_candidates, parse_candidates};

/// Per-paper similarity to every centroid, most similar first.
pub fn rank_candidates(
    vectors: &BTreeMap<PaperId, TermVector>,
    centroids: &[crate::cluster::Centroid],
) -> BTreeMap<PaperId, Vec<Candidate>> {
    vectors
        .iter()
        .map(|(p, v)| {
            let mut c: Vec<Candidate> =
                centroids.iter().map(|c| Candidate { type_id: c.type_id.clone(), similarity: v.cosine(&c.vector) }).collect();
            c.sort_by(|a, b| b.similarity.total_cmp(&a.similarity).then_with(|| a.type_id.cmp(&b.type_id)));
            (p.clone(), c)
        })
        .collect()
}

/// Concepts with object and attribute names, one JSON object per line.
pub fn write_concepts(context: &FormalContext, concepts: &[Concept]) -> String {
    write_jsonl(concepts.iter().enumerate().map(|(i, c)| concept_json(context, i, c)))
}

fn concept_json(context: &FormalContext, id: usize, c: &Concept) -> serde_json::Value {
    json!({
        "id": id,
        "extent": c.extent.iter().map(|&o| &context.objects()[o]).collect::<Vec<_>>(),
        "intent": c.intent.iter().map(|&a| &context.attributes()[a]).collect::<Vec<_>>(),
    })
}

/// The whole lattice as one JSON document, as served by the query service.
pub fn lattice_json(context: &FormalContext, concepts: &[Concept], cover: &[(usize, usize)]) -> String {
    let doc = json!({
        "objects": context.objects(),
        "attributes": context.attributes(),
        "concepts": concepts.iter().enumerate().map(|(i, c)| concept_json(context, i, c)).collect::<Vec<_>>(),
        "cover": cover,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
