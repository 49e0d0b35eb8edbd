use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Point ids are positions in the dataset, `0..n`.
pub type PointId = usize;

/// A non-empty collection of vectors sharing one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorDataset {
    dim: usize,
    points: Vec<Vector>,
}

impl VectorDataset {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let dim = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::param("datasets are limited to 2^32 - 1 points"));
        }
        Ok(VectorDataset { dim, points })
    }

    /// Dense dataset from rows of coordinates.
    pub fn from_rows<I, R>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .map(|r| Vector::dense(r.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: PointId) -> &Vector {
        &self.points[id]
    }

    pub fn get(&self, id: PointId) -> Option<&Vector> {
        self.points.get(id)
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, &Vector)> {
        self.points.iter().enumerate()
    }

    pub fn is_sparse(&self) -> bool {
        self.points.iter().any(Vector::is_sparse)
    }

    pub(crate) fn check_query(&self, q: &Vector) -> Result<()> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: q.dim(),
            });
        }
        Ok(())
    }
}
