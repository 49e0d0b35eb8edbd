//! Dense and sparse real vectors with the dot product and Euclidean distance
//! shared by every index in the crate.
//!
//! Sparse vectors are canonical from construction: indices strictly
//! increasing, no explicit zeros. All accumulation runs in ascending
//! coordinate order so `dot(a, b)` and `dot(b, a)` round identically for
//! every pairing of representations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (i as usize, v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Vector {
    Dense(Vec<f64>),
    Sparse(SparseVector),
}

impl Vector {
    pub fn dense(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidVector("dimension must be at least 1".into()));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidVector(format!(
                "non-finite coordinate at index {pos}"
            )));
        }
        Ok(Vector::Dense(coords))
    }

    /// Builds a canonical sparse vector. Entries are sorted by index, a
    /// repeated index keeps its last value, and zeros are dropped.
    pub fn sparse(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidVector("dimension must be at least 1".into()));
        }
        if dim > u32::MAX as usize {
            return Err(Error::InvalidVector(format!("dimension {dim} too large")));
        }
        let mut tagged: Vec<(usize, usize, f64)> = Vec::new();
        for (order, (idx, val)) in entries.into_iter().enumerate() {
            if idx >= dim {
                return Err(Error::InvalidVector(format!(
                    "index {idx} out of range for dimension {dim}"
                )));
            }
            if !val.is_finite() {
                return Err(Error::InvalidVector(format!(
                    "non-finite value at index {idx}"
                )));
            }
            tagged.push((idx, order, val));
        }
        tagged.sort_unstable_by_key(|&(idx, order, _)| (idx, order));
        let mut indices = Vec::with_capacity(tagged.len());
        let mut values = Vec::with_capacity(tagged.len());
        for (pos, &(idx, _, val)) in tagged.iter().enumerate() {
            let last_of_run = tagged.get(pos + 1).is_none_or(|next| next.0 != idx);
            if last_of_run && val != 0.0 {
                indices.push(idx as u32);
                values.push(val);
            }
        }
        Ok(Vector::Sparse(SparseVector {
            dim,
            indices,
            values,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Vector::Dense(c) => c.len(),
            Vector::Sparse(s) => s.dim,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Vector::Sparse(_))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Vector::Dense(c) => c.clone(),
            Vector::Sparse(s) => {
                let mut out = vec![0.0; s.dim];
                for (i, v) in s.iter() {
                    out[i] = v;
                }
                out
            }
        }
    }

    pub fn as_dense(&self) -> Option<&[f64]> {
        match self {
            Vector::Dense(c) => Some(c),
            Vector::Sparse(_) => None,
        }
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        check_dims(self, other)?;
        Ok(dot_unchecked(self, other))
    }

    pub fn l2_distance(&self, other: &Vector) -> Result<f64> {
        check_dims(self, other)?;
        Ok(squared_distance_unchecked(self, other).sqrt())
    }

    pub fn squared_norm(&self) -> f64 {
        dot_unchecked(self, self)
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    /// Coordinate-wise difference `self - other`, sparse only when both are.
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dims(self, other)?;
        match (self, other) {
            (Vector::Sparse(a), Vector::Sparse(b)) => {
                let entries = a.iter().chain(b.iter().map(|(i, v)| (i, -v)));
                let mut acc: Vec<(usize, f64)> = entries.collect();
                acc.sort_by_key(|&(i, _)| i);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(acc.len());
                for (i, v) in acc {
                    match merged.last_mut() {
                        Some(last) if last.0 == i => last.1 += v,
                        _ => merged.push((i, v)),
                    }
                }
                Vector::sparse(a.dim, merged)
            }
            _ => {
                let a = self.to_dense();
                let b = other.to_dense();
                Vector::dense(a.iter().zip(&b).map(|(x, y)| x - y).collect())
            }
        }
    }

    pub fn scale(&self, factor: f64) -> Vector {
        match self {
            Vector::Dense(c) => Vector::Dense(c.iter().map(|v| v * factor).collect()),
            Vector::Sparse(s) => Vector::Sparse(SparseVector {
                dim: s.dim,
                indices: s.indices.clone(),
                values: s.values.iter().map(|v| v * factor).collect(),
            }),
        }
    }
}

pub fn dot(a: &Vector, b: &Vector) -> Result<f64> {
    a.dot(b)
}

pub fn l2_distance(a: &Vector, b: &Vector) -> Result<f64> {
    a.l2_distance(b)
}

fn check_dims(a: &Vector, b: &Vector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

pub(crate) fn dot_unchecked(a: &Vector, b: &Vector) -> f64 {
    match (a, b) {
        (Vector::Dense(x), Vector::Dense(y)) => {
            let mut acc = 0.0;
            for (u, v) in x.iter().zip(y) {
                acc += u * v;
            }
            acc
        }
        (Vector::Dense(x), Vector::Sparse(s)) | (Vector::Sparse(s), Vector::Dense(x)) => {
            let mut acc = 0.0;
            for (i, v) in s.iter() {
                acc += x[i] * v;
            }
            acc
        }
        (Vector::Sparse(s), Vector::Sparse(t)) => {
            let (mut i, mut j) = (0, 0);
            let mut acc = 0.0;
            while i < s.indices.len() && j < t.indices.len() {
                match s.indices[i].cmp(&t.indices[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += s.values[i] * t.values[j];
                        i += 1;
                        j += 1;
                    }
                }
            }
            acc
        }
    }
}

pub(crate) fn squared_distance_unchecked(a: &Vector, b: &Vector) -> f64 {
    match (a, b) {
        (Vector::Dense(x), Vector::Dense(y)) => {
            let mut acc = 0.0;
            for (u, v) in x.iter().zip(y) {
                let d = u - v;
                acc += d * d;
            }
            acc
        }
        (Vector::Dense(x), Vector::Sparse(s)) | (Vector::Sparse(s), Vector::Dense(x)) => {
            let mut acc = 0.0;
            let mut entries = s.iter().peekable();
            for (i, &u) in x.iter().enumerate() {
                let v = match entries.peek() {
                    Some(&(j, v)) if j == i => {
                        entries.next();
                        v
                    }
                    _ => 0.0,
                };
                let d = u - v;
                acc += d * d;
            }
            acc
        }
        (Vector::Sparse(s), Vector::Sparse(t)) => {
            let (mut i, mut j) = (0, 0);
            let mut acc = 0.0;
            loop {
                let next_s = s.indices.get(i);
                let next_t = t.indices.get(j);
                let d = match (next_s, next_t) {
                    (None, None) => break,
                    (Some(_), None) => {
                        i += 1;
                        s.values[i - 1]
                    }
                    (None, Some(_)) => {
                        j += 1;
                        t.values[j - 1]
                    }
                    (Some(a), Some(b)) => match a.cmp(b) {
                        std::cmp::Ordering::Less => {
                            i += 1;
                            s.values[i - 1]
                        }
                        std::cmp::Ordering::Greater => {
                            j += 1;
                            t.values[j - 1]
                        }
                        std::cmp::Ordering::Equal => {
                            i += 1;
                            j += 1;
                            s.values[i - 1] - t.values[j - 1]
                        }
                    },
                };
                acc += d * d;
            }
            acc
        }
    }
}

pub(crate) fn distance_unchecked(a: &Vector, b: &Vector) -> f64 {
    squared_distance_unchecked(a, b).sqrt()
}
