use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClusterError, PaperType};
use crate::{PaperId, TypeId};

/// Stratified split of each type's seeds into training seeds and held-out
/// gold labels. Each type holds out `max(1, round(fraction * n))` seeds,
/// capped so at least one seed stays in training.
pub fn holdout_split(
    types: &[PaperType],
    fraction: f64,
    rng_seed: u64,
) -> Result<(Vec<PaperType>, BTreeMap<PaperId, TypeId>), ClusterError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(ClusterError::InvalidFraction(fraction));
    }
    let mut sorted: Vec<&PaperType> = types.iter().collect();
    sorted.sort_by(|a, b| a.type_id.cmp(&b.type_id));

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut train = Vec::with_capacity(sorted.len());
    let mut gold = BTreeMap::new();
    for t in sorted {
        let mut seeds = t.seed_paper_ids.clone();
        seeds.sort();
        seeds.dedup();
        let n = seeds.len();
        if n < 2 {
            return Err(ClusterError::TooFewSeeds(t.type_id.clone()));
        }
        let test_count = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
        seeds.shuffle(&mut rng);
        let mut kept = seeds.split_off(test_count);
        kept.sort();
        for p in seeds {
            gold.insert(p, t.type_id.clone());
        }
        train.push(PaperType { type_id: t.type_id.clone(), description: t.description.clone(), seed_paper_ids: kept });
    }
    Ok((train, gold))
}
