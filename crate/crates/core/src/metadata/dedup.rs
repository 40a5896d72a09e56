use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::author::{fold_diacritics, fold_latex};
use super::MetadataError;

/// Hash of a normalized title and year; equal inputs after normalization give
/// equal keys.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DedupKey(String);

impl DedupKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DedupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercased title with escapes and diacritics folded and every
/// non-alphanumeric character removed.
pub fn normalize_title(title: &str) -> String {
    fold_diacritics(&fold_latex(title)).chars().filter(|c| c.is_alphanumeric()).collect()
}

pub fn make_dedup_key(title: &str, year: Option<i32>) -> Result<DedupKey, MetadataError> {
    let normalized = normalize_title(title);
    if normalized.is_empty() {
        return Err(MetadataError::EmptyTitle);
    }
    let mut hasher = Sha256::new();
    hasher.update(normalized.as_bytes());
    hasher.update(b"\x1f");
    hasher.update(year.unwrap_or(0).to_string().as_bytes());
    let digest = hasher.finalize();
    Ok(DedupKey(hex::encode(&digest[..10])))
}

/// Last standalone four-digit token between 1800 and 2099.
pub fn extract_year(text: &str) -> Option<i32> {
    let bytes = text.as_bytes();
    let mut found = None;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i - start == 4 {
                let year: i32 = text[start..i].parse().ok()?;
                if (1800..=2099).contains(&year) {
                    found = Some(year);
                }
            }
        } else {
            i += 1;
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn key(t: &str, y: i32) -> DedupKey {
        make_dedup_key(t, Some(y)).unwrap()
    }

    #[test]
    fn punctuation_and_case_do_not_matter() {
        assert_eq!(key("The Design!", 2015), key("the design", 2015));
    }

    #[test]
    fn year_is_part_of_the_key() {
        assert_ne!(key("A", 2015), key("A", 2016));
        assert_ne!(make_dedup_key("A", None).unwrap(), key("A", 2015));
        assert_eq!(make_dedup_key("A", None).unwrap(), key("A", 0));
    }

    #[test]
    fn empty_titles_are_rejected() {
        assert!(matches!(make_dedup_key("", Some(2000)), Err(MetadataError::EmptyTitle)));
        assert!(matches!(make_dedup_key(" -- !", Some(2000)), Err(MetadataError::EmptyTitle)));
    }

    /// Twenty noisy variants, grouped by hand into eight underlying works.
    #[test]
    fn noisy_title_fixture_has_eight_keys() {
        let variants: [(&str, i32, usize); 20] = [
            ("Altruistic punishment in humans", 2002, 0),
            ("Altruistic Punishment in Humans.", 2002, 0),
            ("{A}ltruistic punishment in humans", 2002, 0),
            ("altruistic  punishment  in  humans!", 2002, 0),
            ("Prospect Theory: An Analysis of Decision under Risk", 1979, 1),
            ("Prospect theory - an analysis of decision under risk", 1979, 1),
            ("PROSPECT THEORY: AN ANALYSIS OF DECISION UNDER RISK", 1979, 1),
            ("Prospect Theory: An Analysis of Decision under Risk", 1980, 2),
            ("z-Tree: Zurich toolbox for ready-made economic experiments", 2007, 3),
            ("z-Tree - Zurich Toolbox for Ready-made Economic Experiments", 2007, 3),
            ("zTree: Zurich toolbox for readymade economic experiments", 2007, 3),
            ("Cooperation and Punishment in Public Goods Experiments", 2000, 4),
            ("Cooperation and punishment in public goods experiments.", 2000, 4),
            ("G\\\"achter's replication study", 2011, 5),
            ("Gächter's Replication Study", 2011, 5),
            ("Gachters replication study", 2011, 5),
            ("Random Forests", 2001, 6),
            ("Random forests.", 2001, 6),
            ("Random Forest", 2001, 7),
            ("RANDOM-FOREST", 2001, 7),
        ];
        let keys: BTreeSet<_> = variants.iter().map(|(t, y, _)| key(t, *y)).collect();
        assert_eq!(keys.len(), 8);
        for a in &variants {
            for b in &variants {
                assert_eq!(key(a.0, a.1) == key(b.0, b.1), a.2 == b.2, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn year_extraction() {
        assert_eq!(extract_year("Nature 415, 137-140 (2002)."), Some(2002));
        assert_eq!(extract_year("pp. 1234-1240, 1999, vol 2100"), Some(1999));
        assert_eq!(extract_year("no year here 12345"), None);
        assert_eq!(extract_year("1799 and 2100"), None);
        assert_eq!(extract_year("2001 then 2003"), Some(2003));
    }
}
