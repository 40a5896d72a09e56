use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEvalReport {
    /// Papers that had a gold label and were scored.
    pub scored: usize,
    pub purity: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub nmi: f64,
    /// Cluster type id to gold type id to count.
    pub confusion: BTreeMap<TypeId, BTreeMap<TypeId, usize>>,
}

impl std::fmt::Display for ClusterEvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "scored\t{}", self.scored)?;
        writeln!(f, "purity\t{:.6}", self.purity)?;
        writeln!(f, "precision\t{:.6}", self.precision)?;
        writeln!(f, "recall\t{:.6}", self.recall)?;
        writeln!(f, "f1\t{:.6}", self.f1)?;
        writeln!(f, "nmi\t{:.6}", self.nmi)?;
        for (cluster, row) in &self.confusion {
            for (gold, n) in row {
                writeln!(f, "confusion\t{cluster}\t{gold}\t{n}")?;
            }
        }
        Ok(())
    }
}

fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| {
        let p = c as f64 / n;
        -p * p.ln()
    }).sum()
}

/// Scores `clustering` against the papers that appear in `gold`.
///
/// Pairwise precision and recall count paper pairs that share a cluster and a
/// gold label. With no same-cluster (or same-label) pairs the ratio is taken
/// as 1. NMI uses natural logs and the arithmetic mean of the two entropies;
/// two single-block partitions score 1.
pub fn evaluate(
    clustering: &BTreeMap<PaperId, TypeId>,
    gold: &BTreeMap<PaperId, TypeId>,
) -> Result<ClusterEvalReport, ClusterError> {
    let mut confusion: BTreeMap<TypeId, BTreeMap<TypeId, usize>> = BTreeMap::new();
    for (paper, label) in gold {
        let cluster = clustering.get(paper).ok_or_else(|| ClusterError::UnknownGoldPaper(paper.clone()))?;
        *confusion.entry(cluster.clone()).or_default().entry(label.clone()).or_insert(0) += 1;
    }
    let n = gold.len();
    let n_labels = gold.values().collect::<std::collections::BTreeSet<_>>().len();
    if n < 2 || n_labels < 2 {
        return Err(ClusterError::InsufficientGold);
    }

    let mut label_sizes: BTreeMap<&TypeId, usize> = BTreeMap::new();
    for row in confusion.values() {
        for (label, c) in row {
            *label_sizes.entry(label).or_insert(0) += c;
        }
    }
    let cluster_sizes: Vec<usize> = confusion.values().map(|row| row.values().sum()).collect();

    let together: u64 = confusion.values().flat_map(|row| row.values()).map(|&c| pairs(c)).sum();
    let cluster_pairs: u64 = cluster_sizes.iter().map(|&c| pairs(c)).sum();
    let label_pairs: u64 = label_sizes.values().map(|&c| pairs(c)).sum();
    let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(together, cluster_pairs);
    let recall = ratio(together, label_pairs);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };

    let majority: usize = confusion.values().map(|row| row.values().copied().max().unwrap_or(0)).sum();
    let purity = majority as f64 / n as f64;

    let nf = n as f64;
    let h_cluster = entropy(cluster_sizes.iter().copied(), nf);
    let h_label = entropy(label_sizes.values().copied(), nf);
    let mut mutual = 0.0;
    for (row, &a) in confusion.values().zip(&cluster_sizes) {
        for (label, &c) in row {
            if c > 0 {
                let b = label_sizes[label];
                mutual += (c as f64 / nf) * ((nf * c as f64) / (a as f64 * b as f64)).ln();
            }
        }
    }
    let nmi = if h_cluster + h_label == 0.0 { 1.0 } else { (2.0 * mutual / (h_cluster + h_label)).clamp(0.0, 1.0) };

    Ok(ClusterEvalReport { scored: n, purity, precision, recall, f1, nmi, confusion })
}
