use std::collections::HashSet;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

const STOPWORDS_V1: &str = include_str!("../../data/stopwords_en_v1.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_V1
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().contains(token)
}

pub fn stopword_count() -> usize {
    stopwords().len()
}

/// Lowercase, split on non-alphanumerics, drop tokens shorter than two
/// characters and purely numeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(char::is_numeric))
        .map(str::to_lowercase)
        .collect()
}

/// English Snowball (Porter2) stemming repeated until the stem stops
/// changing, so `experimental`, `experiments` and `experiment` share a stem
/// and the result is idempotent.
pub fn stem(token: &str) -> String {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    let stemmer = STEMMER.get_or_init(|| Stemmer::create(Algorithm::English));
    let mut current = token.to_owned();
    for _ in 0..MAX_STEM_PASSES {
        let next = stemmer.stem(&current);
        if next == current {
            break;
        }
        current = next.into_owned();
    }
    current
}

/// Passes rarely exceed three; the cap only guards against a rewrite cycle.
const MAX_STEM_PASSES: usize = 8;

/// Stems of the non-stopword tokens, in text order.
pub fn content_stems(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| !is_stopword(t)).map(|t| stem(&t)).collect()
}

/// Stems grouped into runs that are not interrupted by a stopword.
pub fn stem_runs(text: &str) -> Vec<Vec<String>> {
    let mut runs = Vec::new();
    let mut current = Vec::new();
    for token in tokenize(text) {
        if is_stopword(&token) {
            if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
        } else {
            current.push(stem(&token));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_rules() {
        assert_eq!(tokenize("K-means, 2 runs!"), ["means", "runs"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("Über 3D x1 42"), ["über", "3d", "x1"]);
    }

    /// Forty words tokenized by hand.
    #[test]
    fn tokenize_forty_word_fixture() {
        let sentence = "In 2013, Dr. A. Smith & co-workers ran 12 lab-based trials: subjects (N=96) \
                        played a 2x2 public-goods game; payoffs were paid in EUR, e.g. 0.5 per token, \
                        and the z-Tree v3.4 software logged every single decision made by each player.";
        let expected = [
            "in", "dr", "smith", "co", "workers", "ran", "lab", "based", "trials", "subjects", "96",
            "played", "2x2", "public", "goods", "game", "payoffs", "were", "paid", "in", "eur", "per",
            "token", "and", "the", "tree", "v3", "software", "logged", "every", "single", "decision",
            "made", "by", "each", "player",
        ];
        // "n=96" splits into "n" (dropped) and "96" (numeric, dropped).
        let expected: Vec<&str> = expected.into_iter().filter(|t| *t != "96").collect();
        assert_eq!(sentence.split_whitespace().count(), 40);
        assert_eq!(tokenize(sentence), expected);
    }

    #[test]
    fn stemming_examples() {
        assert_eq!(stem("run"), "run");
        assert_eq!(stem("behavioral"), "behavior");
        let family: Vec<_> = ["experiments", "experimental", "experiment"].iter().map(|w| stem(w)).collect();
        assert!(family.iter().all(|s| s == &family[0]), "{family:?}");
    }

    #[test]
    fn stem_is_idempotent_on_lexicon() {
        let lexicon = [
            "behavioral", "behaviour", "experiments", "experimental", "subjects", "laboratory", "payoffs",
            "reciprocity", "punishment", "classifier", "classification", "algorithms", "training", "kernels",
            "gradient", "theory", "happily", "generalization", "clustering", "evaluated",
        ];
        for word in lexicon {
            let once = stem(word);
            assert_eq!(stem(&once), once, "{word}");
        }
    }

    #[test]
    fn stopword_list_loaded() {
        assert!(stopword_count() >= 300);
        assert!(is_stopword("the"));
        assert!(!is_stopword("experiment"));
    }

    #[test]
    fn runs_break_at_stopwords() {
        assert_eq!(stem_runs("public goods in the laboratory"), vec![vec!["public", "good"], vec!["laboratori"]]);
    }
}
