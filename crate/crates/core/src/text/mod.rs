//! Feature extraction: tokenizing, stemming, TF-IDF, keyphrases and corpus
//! statistics over abstracts.

use thiserror::Error;

mod analyze;
pub mod keyphrase;
pub mod stats;
pub mod tfidf;
mod vector;

pub use analyze::{content_stems, is_stopword, stem, stem_runs, stopword_count, tokenize};
pub use keyphrase::{keyphrase_frequencies, keyphrases, Keyphrase};
pub use stats::{abstract_histogram, stem_cloud, AbstractLengthHistogram, StemStat};
pub use tfidf::{build_tfidf, DocumentFrequencies, TfidfOutput};
pub use vector::TermVector;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("invalid weight {weight} for term '{term}'")]
    InvalidWeight { term: String, weight: f64 },
    #[error("tf-idf needs at least one document")]
    EmptyCorpus,
    #[error("bucket width must be at least 1")]
    ZeroBucketWidth,
}

/// Which text region feeds the feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    /// Title plus abstract.
    #[default]
    Abstract,
    /// Title plus full body text, falling back to the abstract.
    Body,
}

impl std::str::FromStr for FeatureSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abstract" => Ok(Self::Abstract),
            "body" => Ok(Self::Body),
            other => Err(format!("unknown feature source '{other}' (expected abstract or body)")),
        }
    }
}

impl std::fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Abstract => "abstract",
            Self::Body => "body",
        })
    }
}

/// The text a paper contributes to its feature vector.
pub fn feature_text(record: &crate::metadata::PaperRecord, source: FeatureSource) -> String {
    let title = record.title().unwrap_or_default();
    let rest = match source {
        FeatureSource::Abstract => record.abstract_text.as_deref(),
        FeatureSource::Body => record.body_text.as_deref().or(record.abstract_text.as_deref()),
    };
    match rest {
        Some(r) => format!("{title}\n{r}"),
        None => title.to_owned(),
    }
}
