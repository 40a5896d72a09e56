//! Seeded k-means with hard seed constraints over cosine similarity.
//!
//! Centroids start as the mean of each type's seed vectors. Seeds never move;
//! every other paper joins the centroid it is most similar to, centroids are
//! re-averaged, and the loop repeats until nothing moves. The objective
//! `sum(1 - cos(paper, centroid))` never increases: the assignment step is
//! optimal for fixed centroids and the mean maximizes summed cosine for a
//! fixed cluster.
//!
//! Restarts after the first begin from a random partition of the unlabeled
//! papers instead of the seed means. The lowest-objective run wins; ties go to
//! the earliest restart.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClusterError, PaperType, TypeAssignment, UNTYPED};
use crate::text::TermVector;
use crate::{PaperId, TypeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub max_iter: usize,
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self { max_iter: 100, restarts: 5, rng_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub type_id: TypeId,
    /// Mean of the member vectors (not normalized).
    pub vector: TermVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignments: BTreeMap<PaperId, TypeId>,
    /// Ordered by type id.
    pub centroids: Vec<Centroid>,
    /// Seed constraints the run honoured.
    pub constrained: BTreeMap<PaperId, TypeId>,
    /// Papers left out because their vector is empty.
    pub excluded: Vec<PaperId>,
    pub objective: f64,
    /// Objective after each centroid update of the winning restart.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub restart: usize,
}

impl Clustering {
    /// Per-paper assignments with a similarity-margin confidence. Constrained
    /// papers get confidence 1; excluded papers become `untyped` with 0.
    pub fn to_assignments(&self, vectors: &BTreeMap<PaperId, TermVector>) -> Vec<TypeAssignment> {
        let mut out = Vec::with_capacity(vectors.len());
        for (id, vector) in vectors {
            let assignment = match self.assignments.get(id) {
                None => TypeAssignment::machine(id.clone(), TypeId::from(UNTYPED), 0.0),
                Some(t) if self.constrained.contains_key(id) => TypeAssignment::machine(id.clone(), t.clone(), 1.0),
                Some(t) => {
                    let own = self.centroids.iter().find(|c| &c.type_id == t).map_or(0.0, |c| vector.cosine(&c.vector));
                    let other = self
                        .centroids
                        .iter()
                        .filter(|c| &c.type_id != t)
                        .map(|c| vector.cosine(&c.vector))
                        .fold(0.0f64, f64::max);
                    TypeAssignment::machine(id.clone(), t.clone(), own - other)
                }
            };
            out.push(assignment);
        }
        out
    }
}

struct Point<'a> {
    id: &'a PaperId,
    entries: Vec<(usize, f64)>,
    norm: f64,
    fixed: Option<usize>,
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    objective: f64,
    trace: Vec<f64>,
    iterations: usize,
}

pub fn seeded_kmeans(
    vectors: &BTreeMap<PaperId, TermVector>,
    types: &[PaperType],
    params: &KMeansParams,
) -> Result<Clustering, ClusterError> {
    if types.len() < 2 {
        return Err(ClusterError::NeedTwoTypes(types.len()));
    }
    let mut sorted: Vec<&PaperType> = types.iter().collect();
    sorted.sort_by(|a, b| a.type_id.cmp(&b.type_id));
    for pair in sorted.windows(2) {
        if pair[0].type_id == pair[1].type_id {
            return Err(ClusterError::DuplicateType(pair[0].type_id.clone()));
        }
    }
    let k = sorted.len();

    let mut seeds: BTreeMap<&PaperId, usize> = BTreeMap::new();
    for (cluster, t) in sorted.iter().enumerate() {
        if t.seed_paper_ids.is_empty() {
            return Err(ClusterError::TypeWithoutSeeds(t.type_id.clone()));
        }
        for p in &t.seed_paper_ids {
            match vectors.get(p) {
                None => return Err(ClusterError::UnknownSeedPaper(p.clone())),
                Some(v) if v.is_empty() => return Err(ClusterError::EmptySeedVector(p.clone())),
                Some(_) => {}
            }
            if let Some(prev) = seeds.insert(p, cluster) {
                if prev != cluster {
                    return Err(ClusterError::ConflictingSeed(p.clone()));
                }
            }
        }
    }

    let mut vocab: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<&str> = Vec::new();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (id, v) in vectors {
        if v.is_empty() {
            excluded.push(id.clone());
            continue;
        }
        let entries = v
            .entries()
            .iter()
            .map(|(term, w)| {
                let idx = *vocab.entry(term.as_str()).or_insert_with(|| {
                    names.push(term.as_str());
                    names.len() - 1
                });
                (idx, *w)
            })
            .collect();
        points.push(Point { id, entries, norm: v.norm(), fixed: seeds.get(id).copied() });
    }
    let dim = names.len();

    let mut best: Option<(usize, Run)> = None;
    for restart in 0..params.restarts.max(1) {
        let initial = if restart == 0 {
            let seed_labels: Vec<Option<usize>> = points.iter().map(|p| p.fixed).collect();
            let centroids = means(&points, &seed_labels, k, dim);
            assign(&points, &centroids)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
            rng.set_stream(restart as u64);
            points.iter().map(|p| p.fixed.unwrap_or_else(|| rng.random_range(0..k))).collect()
        };
        let run = lloyd(&points, initial, k, dim, params.max_iter.max(1));
        let better = match &best {
            None => true,
            Some((_, b)) => run.objective < b.objective - 1e-12,
        };
        if better {
            best = Some((restart, run));
        }
    }
    let (restart, run) = best.expect("at least one restart");

    let assignments = points
        .iter()
        .zip(&run.labels)
        .map(|(p, &l)| (p.id.clone(), sorted[l].type_id.clone()))
        .collect();
    let centroids = run
        .centroids
        .iter()
        .zip(&sorted)
        .map(|(c, t)| {
            let weights = c.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, w)| (names[i].to_owned(), *w));
            Centroid { type_id: t.type_id.clone(), vector: TermVector::from_weights(weights).expect("means are non-negative") }
        })
        .collect();
    let constrained = seeds.into_iter().map(|(p, c)| (p.clone(), sorted[c].type_id.clone())).collect();

    Ok(Clustering {
        assignments,
        centroids,
        constrained,
        excluded,
        objective: run.objective,
        objective_trace: run.trace,
        iterations: run.iterations,
        restart,
    })
}

fn lloyd(points: &[Point], mut labels: Vec<usize>, k: usize, dim: usize, max_iter: usize) -> Run {
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let as_opt: Vec<Option<usize>> = labels.iter().copied().map(Some).collect();
        let centroids = means(points, &as_opt, k, dim);
        let objective = objective(points, &labels, &centroids);
        trace.push(objective);
        let next = assign(points, &centroids);
        if next == labels || iterations >= max_iter {
            return Run { labels, centroids, objective, trace, iterations };
        }
        labels = next;
    }
}

fn means(points: &[Point], labels: &[Option<usize>], k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, label) in points.iter().zip(labels) {
        if let Some(c) = *label {
            counts[c] += 1;
            for &(i, w) in &p.entries {
                sums[c][i] += w;
            }
        }
    }
    for (sum, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            let n = n as f64;
            sum.iter_mut().for_each(|w| *w /= n);
        }
    }
    sums
}

fn cosine(p: &Point, centroid: &[f64], centroid_norm: f64) -> f64 {
    if centroid_norm == 0.0 || p.norm == 0.0 {
        return 0.0;
    }
    p.entries.iter().map(|&(i, w)| w * centroid[i]).sum::<f64>() / (p.norm * centroid_norm)
}

fn norms(centroids: &[Vec<f64>]) -> Vec<f64> {
    centroids.iter().map(|c| c.iter().map(|w| w * w).sum::<f64>().sqrt()).collect()
}

/// Seeds keep their cluster; everyone else takes the most similar centroid,
/// with ties going to the lowest index.
fn assign(points: &[Point], centroids: &[Vec<f64>]) -> Vec<usize> {
    let norms = norms(centroids);
    points
        .iter()
        .map(|p| {
            if let Some(c) = p.fixed {
                return c;
            }
            let mut best = 0;
            let mut best_sim = f64::NEG_INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let sim = cosine(p, centroid, norms[c]);
                if sim > best_sim {
                    best = c;
                    best_sim = sim;
                }
            }
            best
        })
        .collect()
}

fn objective(points: &[Point], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    let norms = norms(centroids);
    points.iter().zip(labels).map(|(p, &c)| 1.0 - cosine(p, &centroids[c], norms[c])).sum()
}
