//! Gaussian projection vectors and the `(value, id)` list entries built from
//! them.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{PointId, VectorDataset};
use crate::random::sample_gaussian_vector;
use crate::vector::{dot_unchecked, Vector};

/// A projected point: `value = a · x` for the list's projection vector `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub id: u32,
}

impl Entry {
    pub fn point_id(&self) -> PointId {
        self.id as PointId
    }

    /// Descending by value, ascending by id on ties.
    pub fn descending(a: &Entry, b: &Entry) -> Ordering {
        b.value.total_cmp(&a.value).then(a.id.cmp(&b.id))
    }
}

pub fn sample_projections<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Vector> {
    (0..count).map(|_| sample_gaussian_vector(dim, rng)).collect()
}

/// All `n` projection values of the dataset onto `a`, in id order.
pub fn project_all(a: &Vector, data: &VectorDataset) -> Vec<Entry> {
    data.iter()
        .map(|(id, x)| Entry {
            value: dot_unchecked(a, x),
            id: id as u32,
        })
        .collect()
}

/// The `m` largest entries sorted descending (ties toward smaller id).
pub fn top_m(mut entries: Vec<Entry>, m: usize) -> Vec<Entry> {
    let m = m.min(entries.len());
    if m == 0 {
        return Vec::new();
    }
    if m < entries.len() {
        entries.select_nth_unstable_by(m - 1, Entry::descending);
        entries.truncate(m);
    }
    entries.sort_unstable_by(Entry::descending);
    entries
}
