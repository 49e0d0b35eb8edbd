use rand::Rng;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::random::RandomSeed;
use crate::vector::distance_unchecked;

/// Intrinsic dimensionality `mu^2 / (2 sigma^2)` of the pairwise distance
/// distribution, estimated from `sample_pairs` random pairs of distinct
/// points (sampled with replacement).
pub fn rho_statistic(data: &VectorDataset, sample_pairs: usize, seed: RandomSeed) -> Result<f64> {
    let n = data.len();
    if n < 2 {
        return Err(Error::param("need at least two points"));
    }
    if sample_pairs == 0 {
        return Err(Error::param("need at least one sample pair"));
    }
    let mut rng = seed.stream(0);
    let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..sample_pairs {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let d = distance_unchecked(data.point(i), data.point(j));
        count += 1.0;
        let delta = d - mean;
        mean += delta / count;
        m2 += delta * (d - mean);
    }
    let variance = m2 / count;
    if !(variance > 0.0) {
        return Err(Error::Degenerate(
            "sampled distances have zero variance".into(),
        ));
    }
    Ok(mean * mean / (2.0 * variance))
}
