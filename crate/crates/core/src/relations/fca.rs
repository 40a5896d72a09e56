//! Formal concept analysis over a papers-by-attributes context.
//!
//! Concepts are enumerated with Ganter's next-closure, which visits the
//! closed intents in lectic order: attribute sets compared as binary numbers
//! whose most significant bit is attribute 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::RelationError;
use crate::cluster::UNTYPED;
use crate::text::Keyphrase;
use crate::{PaperId, TypeId};

pub const TYPE_PREFIX: &str = "type:";
pub const KEYPHRASE_PREFIX: &str = "keyphrase:";
pub const CITES_TYPE_PREFIX: &str = "cites-type:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    /// One attribute bitset per object.
    rows: Vec<FixedBitSet>,
}

impl FormalContext {
    pub fn new(objects: Vec<String>, attributes: Vec<String>, incidence: &[Vec<bool>]) -> Result<Self, RelationError> {
        let mut seen = BTreeSet::new();
        for o in &objects {
            if !seen.insert(o.as_str()) {
                return Err(RelationError::DuplicateObject(o.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !seen.insert(a.as_str()) {
                return Err(RelationError::DuplicateAttribute(a.clone()));
            }
        }
        let bad_row = incidence.iter().find(|r| r.len() != attributes.len());
        if incidence.len() != objects.len() || bad_row.is_some() {
            return Err(RelationError::DimensionMismatch {
                rows: incidence.len(),
                cols: bad_row.or(incidence.first()).map_or(attributes.len(), Vec::len),
                objects: objects.len(),
                attributes: attributes.len(),
            });
        }
        let rows = incidence
            .iter()
            .map(|r| {
                let mut bits = FixedBitSet::with_capacity(attributes.len());
                r.iter().enumerate().filter(|(_, b)| **b).for_each(|(i, _)| bits.insert(i));
                bits
            })
            .collect();
        Ok(Self { objects, attributes, rows })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn has(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    /// Objects having every attribute in `intent`.
    pub fn extent_of(&self, intent: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.objects.len());
        for (i, row) in self.rows.iter().enumerate() {
            if intent.is_subset(row) {
                out.insert(i);
            }
        }
        out
    }

    /// Attributes shared by every object in `extent` (all attributes when
    /// `extent` is empty).
    pub fn intent_of(&self, extent: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.attributes.len());
        out.insert_range(..);
        for i in extent.ones() {
            out.intersect_with(&self.rows[i]);
        }
        out
    }

    pub fn closure(&self, intent: &FixedBitSet) -> FixedBitSet {
        self.intent_of(&self.extent_of(intent))
    }

    /// Incidence as `objects` lines of `0`/`1`, for golden comparisons.
    pub fn to_matrix_text(&self) -> String {
        let mut out = String::new();
        for (o, row) in self.objects.iter().zip(&self.rows) {
            let bits: String = (0..self.attributes.len()).map(|a| if row.contains(a) { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{o}\t{bits}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Concept {
    /// Object indices, ascending.
    pub extent: Vec<usize>,
    /// Attribute indices, ascending.
    pub intent: Vec<usize>,
}

/// Context of typed papers. Each gets `type:<t>`, `keyphrase:<p>` for its
/// first `top_k` keyphrases and `cites-type:<t>` for every typed paper it
/// cites. Objects and attributes are sorted.
pub fn build_context(
    citations: &BTreeMap<PaperId, Vec<PaperId>>,
    assignments: &BTreeMap<PaperId, TypeId>,
    keyphrases: &BTreeMap<PaperId, Vec<Keyphrase>>,
    top_k: usize,
) -> Result<FormalContext, RelationError> {
    let typed = |p: &PaperId| assignments.get(p).filter(|t| t.as_str() != UNTYPED);
    let mut per_object: BTreeMap<&PaperId, BTreeSet<String>> = BTreeMap::new();
    for (paper, t) in assignments {
        if t.as_str() == UNTYPED {
            continue;
        }
        let attrs = per_object.entry(paper).or_default();
        attrs.insert(format!("{TYPE_PREFIX}{t}"));
        for k in keyphrases.get(paper).into_iter().flatten().take(top_k) {
            attrs.insert(format!("{KEYPHRASE_PREFIX}{}", k.phrase));
        }
        for cited in citations.get(paper).into_iter().flatten() {
            if let Some(ct) = typed(cited) {
                attrs.insert(format!("{CITES_TYPE_PREFIX}{ct}"));
            }
        }
    }
    if per_object.is_empty() {
        return Err(RelationError::EmptyContext);
    }
    let attributes: Vec<String> =
        per_object.values().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&str, usize> = attributes.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let incidence: Vec<Vec<bool>> = per_object
        .values()
        .map(|attrs| {
            let mut row = vec![false; attributes.len()];
            attrs.iter().for_each(|a| row[index[a.as_str()]] = true);
            row
        })
        .collect();
    let objects = per_object.keys().map(|p| p.to_string()).collect();
    FormalContext::new(objects, attributes, &incidence)
}

/// All concepts of `context`, intents in lectic order.
pub fn enumerate_concepts(context: &FormalContext) -> Vec<Concept> {
    let m = context.attributes.len();
    let mut out = Vec::new();
    let mut current = context.closure(&FixedBitSet::with_capacity(m));
    loop {
        let extent = context.extent_of(&current);
        out.push(Concept { extent: extent.ones().collect(), intent: current.ones().collect() });
        match next_closure(context, &current) {
            Some(next) => current = next,
            None => return out,
        }
    }
}

/// The lectically next closed set after `current`, if any.
fn next_closure(context: &FormalContext, current: &FixedBitSet) -> Option<FixedBitSet> {
    let m = context.attributes.len();
    for i in (0..m).rev() {
        if current.contains(i) {
            continue;
        }
        let mut candidate = FixedBitSet::with_capacity(m);
        current.ones().take_while(|&j| j < i).for_each(|j| candidate.insert(j));
        candidate.insert(i);
        let closed = context.closure(&candidate);
        // Accept only if the closure adds nothing below i.
        if (0..i).all(|j| closed.contains(j) == current.contains(j)) {
            return Some(closed);
        }
    }
    None
}

/// Hasse diagram of the concept order: `(a, b)` when `a`'s extent is a proper
/// subset of `b`'s with no concept in between. Indices refer to `concepts`.
pub fn lattice_cover(concepts: &[Concept]) -> Vec<(usize, usize)> {
    let sets: Vec<BTreeSet<usize>> = concepts.iter().map(|c| c.extent.iter().copied().collect()).collect();
    let mut by_size: Vec<usize> = (0..concepts.len()).collect();
    by_size.sort_by_key(|&i| (sets[i].len(), i));

    let mut edges = Vec::new();
    for a in 0..concepts.len() {
        let mut covers: Vec<usize> = Vec::new();
        for &b in &by_size {
            if sets[b].len() <= sets[a].len() || !sets[a].is_subset(&sets[b]) {
                continue;
            }
            // Candidates arrive smallest first, so b is minimal above a
            // exactly when no accepted cover sits below it.
            if covers.iter().all(|&c| !sets[c].is_subset(&sets[b])) {
                covers.push(b);
            }
        }
        covers.sort_unstable();
        edges.extend(covers.into_iter().map(|b| (a, b)));
    }
    edges
}

/// DOT rendering of the lattice; node labels are `intent size/extent size`.
pub fn lattice_dot(concepts: &[Concept], cover: &[(usize, usize)]) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    for (i, c) in concepts.iter().enumerate() {
        let _ = writeln!(out, "  c{i} [label=\"{}/{}\"];", c.intent.len(), c.extent.len());
    }
    for (a, b) in cover {
        let _ = writeln!(out, "  c{a} -> c{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(rows: &[&str]) -> FormalContext {
        let m = rows.first().map_or(0, |r| r.len());
        let objects = (0..rows.len()).map(|i| format!("o{i}")).collect();
        let attributes = (0..m).map(|i| format!("a{i}")).collect();
        let incidence: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
        FormalContext::new(objects, attributes, &incidence).unwrap()
    }

    #[test]
    fn all_true_has_one_concept() {
        let concepts = enumerate_concepts(&ctx(&["111", "111"]));
        assert_eq!(concepts, vec![Concept { extent: vec![0, 1], intent: vec![0, 1, 2] }]);
        assert!(lattice_cover(&concepts).is_empty());
    }

    #[test]
    fn identity_three_by_three() {
        let concepts = enumerate_concepts(&ctx(&["100", "010", "001"]));
        let intents: Vec<Vec<usize>> = concepts.iter().map(|c| c.intent.clone()).collect();
        // Lectic order: {} < {2} < {1} < {0} < {0,1,2}.
        assert_eq!(intents, vec![vec![], vec![2], vec![1], vec![0], vec![0, 1, 2]]);
        assert_eq!(concepts[0].extent, vec![0, 1, 2]);
        assert!(concepts[4].extent.is_empty());
        let cover = lattice_cover(&concepts);
        assert_eq!(cover.len(), 6);
        assert!(cover.contains(&(4, 1)) && cover.contains(&(1, 0)));
    }

    #[test]
    fn chain_has_no_transitive_edge() {
        let concepts = enumerate_concepts(&ctx(&["100", "110", "111"]));
        assert_eq!(concepts.len(), 3);
        assert_eq!(lattice_cover(&concepts).len(), 2);
    }

    #[test]
    fn empty_context_still_has_a_concept() {
        let empty = FormalContext::new(vec![], vec![], &[]).unwrap();
        assert_eq!(enumerate_concepts(&empty), vec![Concept { extent: vec![], intent: vec![] }]);
        let no_attrs = FormalContext::new(vec!["x".into()], vec![], &[vec![]]).unwrap();
        assert_eq!(enumerate_concepts(&no_attrs), vec![Concept { extent: vec![0], intent: vec![] }]);
    }

    #[test]
    fn context_validation() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(
            FormalContext::new(s(&["a", "a"]), s(&["x"]), &[vec![true], vec![true]]),
            Err(RelationError::DuplicateObject("a".into()))
        );
        assert_eq!(
            FormalContext::new(s(&["a"]), s(&["x", "x"]), &[vec![true, true]]),
            Err(RelationError::DuplicateAttribute("x".into()))
        );
        assert!(matches!(
            FormalContext::new(s(&["a"]), s(&["x"]), &[vec![true, false]]),
            Err(RelationError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn build_single_paper_context() {
        let assignments = BTreeMap::from([(PaperId::from("p"), TypeId::from("T"))]);
        let keyphrases = BTreeMap::from([(
            PaperId::from("p"),
            vec![Keyphrase { phrase: "game".into(), score: 1.0 }, Keyphrase { phrase: "theori".into(), score: 0.5 }],
        )]);
        let c = build_context(&BTreeMap::new(), &assignments, &keyphrases, 1).unwrap();
        assert_eq!(c.attributes(), ["keyphrase:game", "type:T"]);
        assert_eq!(c.to_matrix_text(), "p\t11\n");
    }

    #[test]
    fn untyped_citations_add_no_attribute() {
        let assignments = BTreeMap::from([
            (PaperId::from("p"), TypeId::from("T")),
            (PaperId::from("u"), TypeId::from(UNTYPED)),
        ]);
        let citations = BTreeMap::from([(PaperId::from("p"), vec![PaperId::from("u"), PaperId::from("ghost")])]);
        let c = build_context(&citations, &assignments, &BTreeMap::new(), 3).unwrap();
        assert_eq!(c.objects(), ["p"]);
        assert_eq!(c.attributes(), ["type:T"]);
        let none = BTreeMap::from([(PaperId::from("u"), TypeId::from(UNTYPED))]);
        assert_eq!(build_context(&citations, &none, &BTreeMap::new(), 3), Err(RelationError::EmptyContext));
    }

    #[test]
    fn dot_labels() {
        let concepts = enumerate_concepts(&ctx(&["10", "11"]));
        let dot = lattice_dot(&concepts, &lattice_cover(&concepts));
        assert!(dot.contains("c0 [label=\"1/2\"];"));
        assert!(dot.contains("c1 -> c0;"));
    }
}
