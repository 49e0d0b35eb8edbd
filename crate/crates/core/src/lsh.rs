//! Euclidean locality-sensitive hashing from quantized Gaussian projections.
//!
//! An atom maps `x` to `floor((a · x + b) / W)` with `a ~ N(0, I)` and
//! `b ~ U[0, W)`. For two points at distance `s` the atoms collide with
//! probability
//!
//! ```text
//! p(s) = 1 - 2 Phi(-W/s) - 2 s / (sqrt(2 pi) W) * (1 - exp(-W^2 / (2 s^2)))
//! ```
//!
//! which decreases in `s`, so the family is `(r1, r2, p(r1), p(r2))`-sensitive
//! for any `r1 < r2`. Atoms are concatenated `k` at a time into bucket keys.

use rand::Rng;
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};
use crate::random::sample_gaussian_vector;
use crate::vector::{dot_unchecked, Vector};

pub type BucketKey = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HashAtom {
    direction: Vector,
    offset: f64,
    width: f64,
}

impl HashAtom {
    pub fn new(direction: Vector, offset: f64, width: f64) -> Result<Self> {
        check_width(width)?;
        if !(0.0..width).contains(&offset) {
            return Err(Error::param(format!("offset {offset} outside [0, {width})")));
        }
        Ok(HashAtom {
            direction,
            offset,
            width,
        })
    }

    pub fn sample<R: Rng + ?Sized>(dim: usize, width: f64, rng: &mut R) -> Result<Self> {
        check_width(width)?;
        let direction = sample_gaussian_vector(dim, rng);
        let offset = rng.random::<f64>() * width;
        Self::new(direction, offset, width)
    }

    pub fn direction(&self) -> &Vector {
        &self.direction
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn hash(&self, x: &Vector) -> Result<i64> {
        check_dim(self.dim(), x)?;
        Ok(self.hash_unchecked(x))
    }

    fn hash_unchecked(&self, x: &Vector) -> i64 {
        ((dot_unchecked(&self.direction, x) + self.offset) / self.width).floor() as i64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcatenatedHash {
    atoms: Vec<HashAtom>,
}

impl ConcatenatedHash {
    pub fn new(atoms: Vec<HashAtom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::param("a concatenated hash needs at least one atom"))?;
        if let Some(bad) = atoms.iter().find(|a| a.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                actual: bad.dim(),
            });
        }
        Ok(ConcatenatedHash { atoms })
    }

    pub fn sample<R: Rng + ?Sized>(dim: usize, k: usize, width: f64, rng: &mut R) -> Result<Self> {
        let atoms = (0..k)
            .map(|_| HashAtom::sample(dim, width, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn k(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[HashAtom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn hash_point(&self, x: &Vector) -> Result<BucketKey> {
        check_dim(self.dim(), x)?;
        Ok(self.hash_unchecked(x))
    }

    pub(crate) fn hash_unchecked(&self, x: &Vector) -> BucketKey {
        self.atoms.iter().map(|a| a.hash_unchecked(x)).collect()
    }
}

fn check_width(width: f64) -> Result<()> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::param(format!("bucket width must be > 0, got {width}")));
    }
    Ok(())
}

fn check_dim(expected: usize, x: &Vector) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.dim(),
        });
    }
    Ok(())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Probability that one atom of width `width` maps two points at distance
/// `s` to the same value.
pub fn collision_probability(s: f64, width: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::param(format!("distance must be > 0, got {s}")));
    }
    check_width(width)?;
    let ratio = width / s;
    let p = 1.0
        - 2.0 * normal_cdf(-ratio)
        - 2.0 / ((2.0 * std::f64::consts::PI).sqrt() * ratio) * (1.0 - (-ratio * ratio / 2.0).exp());
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub r1: f64,
    pub r2: f64,
    pub p1: f64,
    pub p2: f64,
    /// `ln(1/p1) / ln(1/p2)`.
    pub rho: f64,
}

/// Sensitivity at radii `w r` and `w c r` for atoms of width `bucket_width`.
pub fn sensitivity_for(r: f64, w: f64, c: f64, bucket_width: f64) -> Result<Sensitivity> {
    if !(r > 0.0) {
        return Err(Error::param(format!("radius must be > 0, got {r}")));
    }
    if !(w > 1.0) {
        return Err(Error::param(format!("annulus width w must be > 1, got {w}")));
    }
    if !(c > 1.0) {
        return Err(Error::param(format!("approximation factor c must be > 1, got {c}")));
    }
    let r1 = w * r;
    let r2 = w * c * r;
    let p1 = collision_probability(r1, bucket_width)?;
    let p2 = collision_probability(r2, bucket_width)?;
    if !(p2 > 0.0 && p1 < 1.0 && p1 > p2) {
        return Err(Error::Degenerate(format!(
            "collision probabilities p1={p1}, p2={p2} do not separate the radii"
        )));
    }
    let rho = (1.0 / p1).ln() / (1.0 / p2).ln();
    Ok(Sensitivity { r1, r2, p1, p2, rho })
}
