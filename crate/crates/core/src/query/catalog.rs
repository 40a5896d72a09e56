use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::QueryError;
use crate::metadata::{PaperExport, PaperRecord};
use crate::store::OntologyState;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, Default, PartialEq)]
struct AuthorEntry {
    /// First raw spelling seen, in paper id order.
    raw: String,
    papers: BTreeSet<PaperId>,
}

/// Read-only bibliographic view: papers, an author index and in-corpus
/// citation counts.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    records: BTreeMap<PaperId, PaperRecord>,
    authors: BTreeMap<String, AuthorEntry>,
    cited_by: BTreeMap<PaperId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorQueryResult {
    pub author: String,
    pub papers: Vec<(PaperId, TypeId)>,
    /// The author as written in the metadata.
    pub contact_hint: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationAgeProfile {
    /// Citing year minus cited year, for non-negative ages.
    pub ages: BTreeMap<i32, usize>,
    /// Citations to a paper published after the citing one.
    pub anomalous: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScientometricReport {
    pub h_index: BTreeMap<String, usize>,
    /// Paper count to number of authors with that many papers.
    pub papers_per_author: BTreeMap<usize, usize>,
    pub citation_age: CitationAgeProfile,
}

/// Largest `h` such that `h` of the counts are at least `h`.
pub fn h_index(citation_counts: &[usize]) -> usize {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|(i, &c)| c > *i).count()
}

impl Catalog {
    pub fn from_records(records: impl IntoIterator<Item = PaperRecord>) -> Self {
        let records: BTreeMap<PaperId, PaperRecord> = records.into_iter().map(|r| (r.paper_id.clone(), r)).collect();
        let mut authors: BTreeMap<String, AuthorEntry> = BTreeMap::new();
        let mut cited_by: BTreeMap<PaperId, usize> = BTreeMap::new();
        for r in records.values() {
            for a in &r.authors {
                let entry = authors.entry(a.normalized.clone()).or_insert_with(|| AuthorEntry {
                    raw: a.raw.clone(),
                    papers: BTreeSet::new(),
                });
                entry.papers.insert(r.paper_id.clone());
            }
            for c in &r.cited_paper_ids {
                if records.contains_key(c) && c != &r.paper_id {
                    *cited_by.entry(c.clone()).or_insert(0) += 1;
                }
            }
        }
        Self { records, authors, cited_by }
    }

    pub fn from_exports(exports: impl IntoIterator<Item = PaperExport>) -> Self {
        Self::from_records(exports.into_iter().map(PaperRecord::from_export))
    }

    pub fn get(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.records.get(id)
    }

    pub fn records(&self) -> impl Iterator<Item = &PaperRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn author_names(&self) -> impl Iterator<Item = &str> {
        self.authors.keys().map(String::as_str)
    }

    /// In-corpus citations received.
    pub fn citation_count(&self, id: &PaperId) -> usize {
        self.cited_by.get(id).copied().unwrap_or(0)
    }

    pub fn author_papers(&self, author: &str) -> Result<Vec<&PaperId>, QueryError> {
        self.authors.get(author).map(|a| a.papers.iter().collect()).ok_or_else(|| QueryError::UnknownAuthor(author.into()))
    }

    /// h-index over in-corpus citations only.
    pub fn h_index(&self, author: &str) -> Result<usize, QueryError> {
        let counts: Vec<usize> = self.author_papers(author)?.into_iter().map(|p| self.citation_count(p)).collect();
        Ok(h_index(&counts))
    }

    /// Authors of papers currently typed `type_id`, most papers first.
    pub fn authors_with_material(&self, state: &OntologyState, type_id: &TypeId) -> Result<Vec<AuthorQueryResult>, QueryError> {
        if !state.types.contains_key(type_id) {
            return Err(QueryError::UnknownType(type_id.clone()));
        }
        let mut grouped: BTreeMap<&str, (&str, Vec<(PaperId, TypeId)>)> = BTreeMap::new();
        for a in state.assignments.values().filter(|a| &a.type_id == type_id) {
            let Some(record) = self.records.get(&a.paper_id) else { continue };
            for author in &record.authors {
                let hint = self.authors.get(&author.normalized).map_or(author.raw.as_str(), |e| e.raw.as_str());
                let slot = grouped.entry(&author.normalized).or_insert((hint, Vec::new()));
                if !slot.1.iter().any(|(p, _)| p == &a.paper_id) {
                    slot.1.push((a.paper_id.clone(), a.type_id.clone()));
                }
            }
        }
        let mut out: Vec<AuthorQueryResult> = grouped
            .into_iter()
            .map(|(author, (hint, papers))| AuthorQueryResult {
                author: author.to_owned(),
                papers,
                contact_hint: hint.to_owned(),
            })
            .collect();
        out.sort_by(|a, b| b.papers.len().cmp(&a.papers.len()).then_with(|| a.author.cmp(&b.author)));
        Ok(out)
    }

    pub fn citation_age_profile(&self) -> CitationAgeProfile {
        let mut profile = CitationAgeProfile::default();
        for r in self.records.values() {
            let Some(citing) = r.year() else { continue };
            for c in &r.cited_paper_ids {
                let Some(cited) = self.records.get(c).and_then(PaperRecord::year) else { continue };
                let age = citing - cited;
                if age < 0 {
                    profile.anomalous += 1;
                } else {
                    *profile.ages.entry(age).or_insert(0) += 1;
                }
            }
        }
        profile
    }

    pub fn papers_per_author(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for a in self.authors.values() {
            *out.entry(a.papers.len()).or_insert(0) += 1;
        }
        out
    }

    pub fn report(&self) -> ScientometricReport {
        let h_index = self
            .authors
            .keys()
            .map(|a| (a.clone(), self.h_index(a).expect("indexed author")))
            .collect();
        ScientometricReport { h_index, papers_per_author: self.papers_per_author(), citation_age: self.citation_age_profile() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_index_definition() {
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[0, 0, 0]), 0);
        assert_eq!(h_index(&[4, 4, 4, 4]), 4);
        assert_eq!(h_index(&[10, 1, 3, 2]), 2);
        assert_eq!(h_index(&[1]), 1);
    }
}
