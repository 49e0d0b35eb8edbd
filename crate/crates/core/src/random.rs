//! Seeded random streams and the Gaussian / unit-sphere samplers.
//!
//! Every random draw in the crate comes from a [`Stream`] obtained through
//! [`RandomSeed::stream`]. Streams are ChaCha8 generators keyed by the seed
//! with the task index selecting the ChaCha stream, so parallel tasks never
//! share state and a run is a pure function of `(seed, task, draw index)`.
//!
//! Normal variates use the ziggurat sampler from `rand_distr`
//! (`StandardNormal`). Changing that method changes every golden output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::vector::Vector;

pub type Stream = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    pub fn new(seed: u64) -> Self {
        RandomSeed(seed)
    }

    /// Independent stream number `task` for this seed.
    pub fn stream(self, task: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(task);
        rng
    }

    /// A child seed determined by this seed and a path of coordinates,
    /// e.g. `(grid cell, repetition)`.
    pub fn derive(self, path: &[u64]) -> RandomSeed {
        let mut h = splitmix64(self.0 ^ 0x6a09_e667_f3bc_c909);
        for &p in path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        RandomSeed(h)
    }
}

impl From<u64> for RandomSeed {
    fn from(v: u64) -> Self {
        RandomSeed(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `d` i.i.d. N(0, 1) coordinates.
pub fn sample_gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    assert!(d >= 1, "dimension must be at least 1");
    Vector::Dense((0..d).map(|_| standard_normal(rng)).collect())
}

/// Uniform point on the unit sphere in `d` dimensions (normalized Gaussian).
pub fn sample_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    assert!(d >= 1, "dimension must be at least 1");
    loop {
        let coords: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return Vector::Dense(coords.into_iter().map(|v| v / norm).collect());
        }
    }
}
