use super::{Centroid, ClusterError, TypeAssignment, UNTYPED};
use crate::text::TermVector;
use crate::{PaperId, TypeId};

/// Nearest-centroid assignment. Confidence is the margin between the best and
/// second-best cosine similarity, clamped to [0, 1]; ties go to the smallest
/// type id.
pub fn classify(paper_id: PaperId, vector: &TermVector, centroids: &[Centroid]) -> Result<TypeAssignment, ClusterError> {
    if centroids.is_empty() {
        return Err(ClusterError::NoCentroids);
    }
    if vector.is_empty() {
        return Ok(TypeAssignment::machine(paper_id, TypeId::from(UNTYPED), 0.0));
    }
    let mut scored: Vec<(&TypeId, f64)> = centroids.iter().map(|c| (&c.type_id, vector.cosine(&c.vector))).collect();
    scored.sort_by(|a, b| a.0.cmp(b.0));
    let mut best = 0;
    for (i, (_, sim)) in scored.iter().enumerate() {
        if *sim > scored[best].1 {
            best = i;
        }
    }
    let s1 = scored[best].1;
    let s2 = scored.iter().enumerate().filter(|(i, _)| *i != best).map(|(_, (_, s))| *s).fold(0.0f64, f64::max);
    Ok(TypeAssignment::machine(paper_id, scored[best].0.clone(), s1 - s2))
}
