use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::analyze::content_stems;
use super::TextError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StemStat {
    pub stem: String,
    /// Number of abstracts containing the stem.
    pub df: usize,
    /// Total occurrences over all abstracts.
    pub tf: usize,
}

/// Stem counts over abstracts, ordered by document frequency descending then
/// stem.
pub fn stem_cloud<'a>(abstracts: impl IntoIterator<Item = &'a str>) -> Vec<StemStat> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for text in abstracts {
        let stems = content_stems(text);
        let distinct: BTreeSet<&String> = stems.iter().collect();
        for s in distinct {
            counts.entry(s.clone()).or_default().0 += 1;
        }
        for s in &stems {
            counts.entry(s.clone()).or_default().1 += 1;
        }
    }
    let mut out: Vec<StemStat> = counts.into_iter().map(|(stem, (df, tf))| StemStat { stem, df, tf }).collect();
    out.sort_by(|a, b| b.df.cmp(&a.df).then_with(|| a.stem.cmp(&b.stem)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractLengthHistogram {
    pub bucket_width: usize,
    /// Bucket index to count; empty buckets are absent.
    pub buckets: BTreeMap<usize, usize>,
}

impl AbstractLengthHistogram {
    pub fn total(&self) -> usize {
        self.buckets.values().sum()
    }

    /// `(bucket_start, count)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.buckets.iter().map(|(b, c)| (b * self.bucket_width, *c))
    }
}

/// Histogram of abstract lengths in characters.
pub fn abstract_histogram<'a>(
    abstracts: impl IntoIterator<Item = &'a str>,
    bucket_width: usize,
) -> Result<AbstractLengthHistogram, TextError> {
    if bucket_width == 0 {
        return Err(TextError::ZeroBucketWidth);
    }
    let mut buckets = BTreeMap::new();
    for text in abstracts {
        *buckets.entry(text.chars().count() / bucket_width).or_insert(0) += 1;
    }
    Ok(AbstractLengthHistogram { bucket_width, buckets })
}
