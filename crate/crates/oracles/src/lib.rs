//! Slow, obviously-correct reference implementations. Each one is written
//! from the definition and shares no code with the library it checks.

use std::collections::{BTreeMap, BTreeSet};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

/// Sum of `1 - cos(point, mean of its cluster)` for a full labelling.
pub fn kmeans_objective(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let dim = points.first().map_or(0, Vec::len);
    let mut means = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (m, x) in means[l].iter_mut().zip(p) {
            *m += x;
        }
    }
    for (m, &c) in means.iter_mut().zip(&counts) {
        if c > 0 {
            m.iter_mut().for_each(|x| *x /= c as f64);
        }
    }
    points.iter().zip(labels).map(|(p, &l)| 1.0 - cosine(p, &means[l])).sum()
}

/// Minimum objective over every labelling that respects `fixed`, by
/// enumerating all `k^u` choices for the `u` free points.
pub fn exhaustive_constrained_optimum(points: &[Vec<f64>], fixed: &[Option<usize>], k: usize) -> (f64, Vec<usize>) {
    let free: Vec<usize> = (0..points.len()).filter(|&i| fixed[i].is_none()).collect();
    let mut labels: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    let total = k.pow(free.len() as u32);
    let mut best = (f64::INFINITY, labels.clone());
    for code in 0..total {
        let mut c = code;
        for &i in &free {
            labels[i] = c % k;
            c /= k;
        }
        let obj = kmeans_objective(points, &labels, k);
        if obj < best.0 {
            best = (obj, labels.clone());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScores {
    pub purity: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub nmi: f64,
}

/// External clustering scores by looking at every pair of items.
///
/// Precision and recall default to 1 when there are no pairs to judge. NMI
/// is `2 I / (H(C) + H(G))` with `I = H(C) + H(G) - H(C, G)`, natural logs,
/// and 1 when both partitions are a single block.
pub fn pair_counting_scores<C: Ord, G: Ord>(clusters: &[C], gold: &[G]) -> PairScores {
    let n = clusters.len();
    assert_eq!(n, gold.len());
    let (mut tp, mut same_c, mut same_g) = (0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let c = clusters[i] == clusters[j];
            let g = gold[i] == gold[j];
            same_c += u64::from(c);
            same_g += u64::from(g);
            tp += u64::from(c && g);
        }
    }
    let precision = if same_c == 0 { 1.0 } else { tp as f64 / same_c as f64 };
    let recall = if same_g == 0 { 1.0 } else { tp as f64 / same_g as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };

    // Purity: for each cluster, the most common gold label among its members.
    let mut majority = 0usize;
    let cluster_ids: BTreeSet<&C> = clusters.iter().collect();
    for c in &cluster_ids {
        let mut best = 0;
        for g in gold.iter().collect::<BTreeSet<_>>() {
            let count = (0..n).filter(|&i| &clusters[i] == *c && &gold[i] == g).count();
            best = best.max(count);
        }
        majority += best;
    }
    let purity = majority as f64 / n as f64;

    let entropy = |counts: Vec<usize>| -> f64 {
        counts.into_iter().filter(|&c| c > 0).map(|c| c as f64 / n as f64).map(|p| -p * p.ln()).sum()
    };
    let count_by = |key: &dyn Fn(usize) -> (usize, usize)| -> Vec<usize> {
        let mut m: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for i in 0..n {
            *m.entry(key(i)).or_insert(0) += 1;
        }
        m.into_values().collect()
    };
    let c_rank: BTreeMap<&C, usize> = cluster_ids.iter().enumerate().map(|(r, c)| (*c, r)).collect();
    let g_rank: BTreeMap<&G, usize> = gold.iter().collect::<BTreeSet<_>>().into_iter().enumerate().map(|(r, g)| (g, r)).collect();
    let hc = entropy(count_by(&|i| (c_rank[&clusters[i]], 0)));
    let hg = entropy(count_by(&|i| (0, g_rank[&gold[i]])));
    let hcg = entropy(count_by(&|i| (c_rank[&clusters[i]], g_rank[&gold[i]])));
    let nmi = if hc + hg == 0.0 { 1.0 } else { (2.0 * (hc + hg - hcg) / (hc + hg)).clamp(0.0, 1.0) };

    PairScores { purity, precision, recall, f1, nmi }
}

/// Every formal concept of a context, found by closing each of the `2^m`
/// attribute subsets. Returned as `(extent, intent)` index lists.
pub fn brute_force_concepts(incidence: &[Vec<bool>], n_attributes: usize) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let n_objects = incidence.len();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << n_attributes) {
        let attrs: Vec<usize> = (0..n_attributes).filter(|a| mask >> a & 1 == 1).collect();
        let extent: Vec<usize> = (0..n_objects).filter(|&o| attrs.iter().all(|&a| incidence[o][a])).collect();
        let intent: Vec<usize> = (0..n_attributes).filter(|&a| extent.iter().all(|&o| incidence[o][a])).collect();
        out.insert((extent, intent));
    }
    out
}

/// Transitive reduction of the strict extent-inclusion order: all related
/// pairs, minus those with some element strictly in between.
pub fn brute_force_cover(extents: &[Vec<usize>]) -> BTreeSet<(usize, usize)> {
    let subset = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|x| b.contains(x));
    let n = extents.len();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if subset(&extents[a], &extents[b])
                && !(0..n).any(|c| subset(&extents[a], &extents[c]) && subset(&extents[c], &extents[b]))
            {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Largest `h` in `0..=n` with at least `h` counts of `h` or more.
pub fn brute_force_h_index(citation_counts: &[usize]) -> usize {
    (0..=citation_counts.len()).rev().find(|&h| citation_counts.iter().filter(|&&c| c >= h).count() >= h).unwrap_or(0)
}

/// Number of citers shared by each unordered pair, by checking every citer
/// against every pair.
pub fn brute_force_cocitation(citations: &BTreeMap<String, BTreeSet<String>>) -> BTreeMap<(String, String), usize> {
    let cited: BTreeSet<&String> = citations.values().flatten().collect();
    let mut out = BTreeMap::new();
    for a in &cited {
        for b in &cited {
            if a < b {
                let n = citations.values().filter(|c| c.contains(*a) && c.contains(*b)).count();
                if n > 0 {
                    out.insert(((*a).clone(), (*b).clone()), n);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_sanity() {
        assert_eq!(brute_force_h_index(&[3, 0, 6, 1, 5]), 3);
        let s = pair_counting_scores(&[0, 0, 0, 0], &["a", "a", "b", "b"]);
        assert_eq!((s.recall, s.precision, s.purity), (1.0, 2.0 / 6.0, 0.5));
        assert_eq!(brute_force_concepts(&[vec![true, false], vec![false, true]], 2).len(), 4);
        let (obj, labels) = exhaustive_constrained_optimum(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.9, 0.1]],
            &[Some(0), Some(1), None],
            2,
        );
        assert_eq!(labels, vec![0, 1, 0]);
        assert!(obj < 0.05);
    }
}
