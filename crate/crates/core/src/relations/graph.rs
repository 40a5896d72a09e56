use std::collections::{BTreeMap, BTreeSet};

use crate::metadata::Corpus;
use crate::PaperId;

fn count_pairs<T: Ord + Clone>(groups: impl Iterator<Item = BTreeSet<T>>) -> BTreeMap<(T, T), usize> {
    let mut out = BTreeMap::new();
    for group in groups {
        let members: Vec<&T> = group.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                *out.entry(((*a).clone(), (*b).clone())).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Number of papers citing both members of each pair. Keys are ordered
/// `(smaller, larger)`; pairs nobody co-cites are absent.
pub fn cocitation(corpus: &Corpus) -> BTreeMap<(PaperId, PaperId), usize> {
    count_pairs(corpus.records.iter().map(|r| r.cited_paper_ids.iter().cloned().collect()))
}

/// Number of papers each pair of normalized author names shares.
pub fn coauthorship(corpus: &Corpus) -> BTreeMap<(String, String), usize> {
    count_pairs(corpus.records.iter().map(|r| r.authors.iter().map(|a| a.normalized.clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::{parse_bibtex, resolve_references, PaperRecord};

    fn corpus(bib: &str, cites: &[(&str, &[&str])]) -> Corpus {
        let mut records: Vec<PaperRecord> =
            parse_bibtex(bib).entries.into_iter().map(|e| PaperRecord::from_entry(e).unwrap()).collect();
        resolve_references(&mut records);
        for (from, to) in cites {
            let r = records.iter_mut().find(|r| r.paper_id.as_str() == *from).unwrap();
            r.cited_paper_ids = to.iter().map(|t| PaperId::from(*t)).collect();
        }
        Corpus { records, warnings: vec![], merge_log: vec![] }
    }

    const BIB: &str = "@article{a, title={Alpha}, author={Ann Lee and Bo Chen}}
@article{b, title={Beta}, author={Ann Lee and Bo Chen}}
@article{c, title={Gamma}, author={Cy Diaz}}
@article{d, title={Delta}, author={Cy Diaz}}";

    #[test]
    fn shared_citers_count() {
        let c = corpus(BIB, &[("c", &["a", "b"]), ("d", &["a", "b"])]);
        let co = cocitation(&c);
        assert_eq!(co.len(), 1);
        assert_eq!(co[&(PaperId::from("a"), PaperId::from("b"))], 2);
        assert!(cocitation(&corpus(BIB, &[("c", &["a"]), ("d", &["b"])])).is_empty());
    }

    #[test]
    fn shared_papers_count() {
        let c = corpus(BIB, &[]);
        let co = coauthorship(&c);
        assert_eq!(co.len(), 1);
        assert_eq!(co[&("ann lee".to_owned(), "bo chen".to_owned())], 2);
        let solo = corpus("@article{x, title={X}, author={Cy Diaz}}", &[]);
        assert!(coauthorship(&solo).is_empty());
    }
}
