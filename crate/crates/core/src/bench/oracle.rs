use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::vector::{distance_unchecked, Vector};

/// Exact furthest neighbor of `q` by linear scan; ties go to the smaller id.
pub fn brute_furthest(data: &VectorDataset, q: &Vector) -> Result<(PointId, f64)> {
    data.check_query(q)?;
    let mut best: Option<(PointId, f64)> = None;
    for (id, x) in data.iter() {
        let d = distance_unchecked(x, q);
        if best.is_none_or(|(_, b)| d > b) {
            best = Some((id, d));
        }
    }
    best.ok_or(Error::EmptyDataset)
}

/// Smallest id with `r/w <= d(q, x) <= w r`, if any.
pub fn brute_annulus(data: &VectorDataset, q: &Vector, r: f64, w: f64) -> Result<Option<PointId>> {
    if !(r > 0.0) || !(w > 1.0) {
        return Err(Error::param(format!("need r > 0 and w > 1, got r={r} w={w}")));
    }
    data.check_query(q)?;
    let (lo, hi) = (r / w, w * r);
    Ok(data
        .iter()
        .find(|(_, x)| {
            let d = distance_unchecked(x, q);
            d >= lo && d <= hi
        })
        .map(|(id, _)| id))
}
