use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RelationError;
use crate::cluster::UNTYPED;
use crate::metadata::Corpus;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CitationType {
    Insight,
    DataReuse,
    MethodReuse,
    Unknown,
}

impl CitationType {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Insight => "insight",
            Self::DataReuse => "data-reuse",
            Self::MethodReuse => "method-reuse",
            Self::Unknown => "unknown",
        }
    }
}

impl fmt::Display for CitationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CitationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "insight" => Ok(Self::Insight),
            "data-reuse" => Ok(Self::DataReuse),
            "method-reuse" => Ok(Self::MethodReuse),
            "unknown" => Ok(Self::Unknown),
            other => Err(format!("unknown citation type '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CitationEdge {
    pub from_paper_id: PaperId,
    pub to_paper_id: PaperId,
    pub citation_type: CitationType,
    pub rule_id: String,
}

/// What one side of a citation must look like for a rule to fire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// `*`: anything, including untyped or unassigned papers.
    Any,
    /// `=`: same type as the other side.
    Same,
    /// `!=`: a different type from the other side.
    Different,
    /// `@eval`: one of the table's evaluation-kind types.
    Evaluation,
    Type(TypeId),
}

impl Pattern {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "" => Err("empty pattern".into()),
            "*" => Ok(Self::Any),
            "=" => Ok(Self::Same),
            "!=" => Ok(Self::Different),
            "@eval" => Ok(Self::Evaluation),
            s if s.starts_with('@') => Err(format!("unknown pattern '{s}'")),
            s => Ok(Self::Type(s.into())),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Any => f.write_str("*"),
            Self::Same => f.write_str("="),
            Self::Different => f.write_str("!="),
            Self::Evaluation => f.write_str("@eval"),
            Self::Type(t) => f.write_str(t.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationRule {
    pub rule_id: String,
    pub citing: Pattern,
    pub cited: Pattern,
    pub result: CitationType,
    pub priority: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    /// Highest priority first.
    rules: Vec<CitationRule>,
    evaluation_kinds: BTreeSet<TypeId>,
}

const DEFAULT_RULES: &str = "\
# priority\tciting\tcited\tresult\trule_id
evaluation-kind\tMLalgo
100\t@eval\t!=\tdata-reuse\teval-cites-other
50\t*\t=\tinsight\tsame-type
0\t*\t*\tunknown\tdefault
";

impl RuleTable {
    pub fn new(mut rules: Vec<CitationRule>, evaluation_kinds: BTreeSet<TypeId>) -> Result<Self, RelationError> {
        rules.sort_by(|a, b| b.priority.cmp(&a.priority));
        for pair in rules.windows(2) {
            if pair[0].priority == pair[1].priority {
                return Err(RelationError::DuplicatePriority(pair[0].priority));
            }
        }
        let has_default = rules
            .iter()
            .any(|r| r.citing == Pattern::Any && r.cited == Pattern::Any && r.result == CitationType::Unknown);
        if !has_default {
            return Err(RelationError::MissingDefaultRule);
        }
        Ok(Self { rules, evaluation_kinds })
    }

    /// The shipped table: an evaluation-kind paper citing another type reuses
    /// its data, a paper citing its own type draws on its insight.
    pub fn default_table() -> Self {
        Self::parse(DEFAULT_RULES).expect("default rules parse")
    }

    pub fn default_text() -> &'static str {
        DEFAULT_RULES
    }

    /// Tab-separated `priority, citing, cited, result[, rule_id]` rows plus
    /// `evaluation-kind<TAB>type` declarations. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, RelationError> {
        let mut rules = Vec::new();
        let mut kinds = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| RelationError::RuleSyntax { line: i + 1, message };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols[0] == "evaluation-kind" {
                match cols.as_slice() {
                    [_, t] if !t.is_empty() => {
                        kinds.insert(TypeId::from(*t));
                    }
                    _ => return Err(err("expected 'evaluation-kind<TAB>type'".into())),
                }
                continue;
            }
            if cols.len() != 4 && cols.len() != 5 {
                return Err(err(format!("expected 4 or 5 tab-separated columns, got {}", cols.len())));
            }
            let priority: i64 = cols[0].parse().map_err(|_| err(format!("bad priority '{}'", cols[0])))?;
            let citing = Pattern::parse(cols[1]).map_err(&err)?;
            let cited = Pattern::parse(cols[2]).map_err(&err)?;
            let result = cols[3].parse().map_err(&err)?;
            let rule_id = match cols.get(4) {
                Some(id) if !id.is_empty() => id.to_string(),
                _ => format!("rule-{priority}"),
            };
            rules.push(CitationRule { rule_id, citing, cited, result, priority });
        }
        Self::new(rules, kinds)
    }

    pub fn rules(&self) -> &[CitationRule] {
        &self.rules
    }

    pub fn evaluation_kinds(&self) -> &BTreeSet<TypeId> {
        &self.evaluation_kinds
    }

    /// Highest-priority matching rule. `None` stands for an untyped endpoint.
    fn fire(&self, citing: Option<&TypeId>, cited: Option<&TypeId>) -> &CitationRule {
        self.rules
            .iter()
            .find(|r| self.side_matches(&r.citing, citing, cited) && self.side_matches(&r.cited, cited, citing))
            .expect("default rule matches every edge")
    }

    fn side_matches(&self, pattern: &Pattern, this: Option<&TypeId>, other: Option<&TypeId>) -> bool {
        match pattern {
            Pattern::Any => true,
            Pattern::Type(t) => this == Some(t),
            Pattern::Evaluation => this.is_some_and(|t| self.evaluation_kinds.contains(t)),
            Pattern::Same => matches!((this, other), (Some(a), Some(b)) if a == b),
            Pattern::Different => matches!((this, other), (Some(a), Some(b)) if a != b),
        }
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.evaluation_kinds {
            writeln!(f, "evaluation-kind\t{k}")?;
        }
        for r in &self.rules {
            writeln!(f, "{}\t{}\t{}\t{}\t{}", r.priority, r.citing, r.cited, r.result, r.rule_id)?;
        }
        Ok(())
    }
}

pub const NO_ASSIGNMENT_RULE: &str = "no-assignment";

/// Resolved citation pairs of a corpus, ordered by citing then cited paper.
pub fn citation_pairs(corpus: &Corpus) -> Vec<(PaperId, PaperId)> {
    let mut out = Vec::new();
    for r in &corpus.records {
        for cited in &r.cited_paper_ids {
            out.push((r.paper_id.clone(), cited.clone()));
        }
    }
    out.sort();
    out
}

/// Types every citation. Duplicate pairs collapse and self-citations are
/// dropped; an endpoint with no assignment yields `unknown` from the
/// `no-assignment` pseudo-rule, an `untyped` endpoint only matches `*`.
pub fn type_citations(
    edges: &[(PaperId, PaperId)],
    assignments: &BTreeMap<PaperId, TypeId>,
    rules: &RuleTable,
) -> Vec<CitationEdge> {
    let unique: BTreeSet<&(PaperId, PaperId)> = edges.iter().filter(|(a, b)| a != b).collect();
    let typed = |p: &PaperId| assignments.get(p).filter(|t| t.as_str() != UNTYPED);
    unique
        .into_iter()
        .map(|(from, to)| {
            let (citation_type, rule_id) = if !assignments.contains_key(from) || !assignments.contains_key(to) {
                (CitationType::Unknown, NO_ASSIGNMENT_RULE.to_owned())
            } else {
                let rule = rules.fire(typed(from), typed(to));
                (rule.result, rule.rule_id.clone())
            };
            CitationEdge { from_paper_id: from.clone(), to_paper_id: to.clone(), citation_type, rule_id }
        })
        .collect()
}
