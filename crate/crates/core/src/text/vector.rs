use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TextError;

/// Sparse non-negative term weights with a cached Euclidean norm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct TermVector {
    entries: BTreeMap<String, f64>,
    norm: f64,
}

impl TermVector {
    /// Zero weights are dropped; negative or non-finite weights are rejected.
    pub fn from_weights(weights: impl IntoIterator<Item = (String, f64)>) -> Result<Self, TextError> {
        let mut entries = BTreeMap::new();
        for (term, weight) in weights {
            if !weight.is_finite() || weight < 0.0 {
                return Err(TextError::InvalidWeight { term, weight });
            }
            if weight > 0.0 {
                entries.insert(term, weight);
            }
        }
        let norm = entries.values().map(|w| w * w).sum::<f64>().sqrt();
        Ok(Self { entries, norm })
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.entries.get(term).copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Returns the vector scaled to unit length; empty vectors stay empty.
    pub fn normalized(&self) -> Self {
        if self.norm == 0.0 {
            return Self::default();
        }
        let entries: BTreeMap<String, f64> =
            self.entries.iter().map(|(t, w)| (t.clone(), w / self.norm)).collect();
        let norm = entries.values().map(|w| w * w).sum::<f64>().sqrt();
        Self { entries, norm }
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.entries.iter().map(|(t, w)| w * large.weight(t)).sum()
    }

    /// Cosine similarity; zero when either side is empty.
    pub fn cosine(&self, other: &TermVector) -> f64 {
        if self.norm == 0.0 || other.norm == 0.0 {
            return 0.0;
        }
        self.dot(other) / (self.norm * other.norm)
    }
}

impl TryFrom<BTreeMap<String, f64>> for TermVector {
    type Error = TextError;

    fn try_from(map: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        Self::from_weights(map)
    }
}

impl From<TermVector> for BTreeMap<String, f64> {
    fn from(v: TermVector) -> Self {
        v.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(pairs: &[(&str, f64)]) -> TermVector {
        TermVector::from_weights(pairs.iter().map(|(t, w)| (t.to_string(), *w))).unwrap()
    }

    #[test]
    fn zeros_dropped_and_norm_cached() {
        let v = tv(&[("a", 3.0), ("b", 0.0), ("c", 4.0)]);
        assert_eq!(v.len(), 2);
        assert!((v.norm() - 5.0).abs() < 1e-12);
        assert!((v.normalized().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_weights_rejected() {
        assert!(TermVector::from_weights([("a".to_string(), -1.0)]).is_err());
        assert!(TermVector::from_weights([("a".to_string(), f64::NAN)]).is_err());
    }

    #[test]
    fn cosine_of_orthogonal_and_empty() {
        let a = tv(&[("x", 1.0)]);
        let b = tv(&[("y", 2.0)]);
        assert_eq!(a.cosine(&b), 0.0);
        assert_eq!(a.cosine(&TermVector::default()), 0.0);
        assert!((a.cosine(&tv(&[("x", 5.0)])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn serde_recomputes_norm() {
        let v = tv(&[("a", 3.0), ("b", 4.0)]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"a":3.0,"b":4.0}"#);
        let back: TermVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
