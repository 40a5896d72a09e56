//! Typed relationships derived from metadata and type assignments: citation
//! typing, co-citation and co-authorship counts, and a concept lattice over
//! papers and their attributes.

use thiserror::Error;

mod citation;
mod fca;
mod graph;

pub use citation::{citation_pairs, type_citations, CitationEdge, CitationRule, CitationType, Pattern, RuleTable};
pub use fca::{
    build_context, enumerate_concepts, lattice_cover, lattice_dot, Concept, FormalContext, CITES_TYPE_PREFIX,
    KEYPHRASE_PREFIX, TYPE_PREFIX,
};
pub use graph::{coauthorship, cocitation};

#[derive(Debug, Error, PartialEq)]
pub enum RelationError {
    #[error("no typed papers to build a context from")]
    EmptyContext,
    #[error("duplicate object '{0}' in context")]
    DuplicateObject(String),
    #[error("duplicate attribute '{0}' in context")]
    DuplicateAttribute(String),
    #[error("incidence is {rows}x{cols}, expected {objects}x{attributes}")]
    DimensionMismatch { rows: usize, cols: usize, objects: usize, attributes: usize },
    #[error("rules line {line}: {message}")]
    RuleSyntax { line: usize, message: String },
    #[error("two rules share priority {0}")]
    DuplicatePriority(i64),
    #[error("rule table lacks a '*' to '*' rule yielding unknown")]
    MissingDefaultRule,
}
