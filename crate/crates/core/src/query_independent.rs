//! Query-independent approximate furthest neighbor orders.
//!
//! Each strategy precomputes one ranking of the data points. A query scans a
//! prefix of that ranking and returns the point furthest from `q` among the
//! first `m` entries; the scan can be resumed to a larger `m`.
//!
//! * [`OrderStrategy::Extremes`]: the argmax point for each of `ell` uniform
//!   unit directions, ranked by how many directions each one won.
//! * [`OrderStrategy::MaxProjection`]: every point keyed by its largest
//!   projection on `ell` Gaussian vectors, descending.
//! * [`OrderStrategy::MinDepth`]: every point keyed by its smallest rank depth
//!   `min(k, n - 1 - k)` over `ell` projections, ties broken by how many
//!   projections reach that depth.
//!
//! The covering bound ([`covering_number`], [`suggested_ell`]) sizes the
//! extremes strategy so that it answers every query within factor `c`
//! with high probability. That requires `ell` exponential in the dimension.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::projection::{project_all, sample_projections};
use crate::query_dependent::QueryResult;
use crate::random::{sample_unit_vector, RandomSeed};
use crate::vector::{distance_unchecked, dot_unchecked, Vector};

const FORMAT_NAME: &str = "afn-query-independent-order";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStrategy {
    Extremes,
    MaxProjection,
    MinDepth,
}

impl OrderStrategy {
    pub fn name(self) -> &'static str {
        match self {
            OrderStrategy::Extremes => "extremes",
            OrderStrategy::MaxProjection => "max_projection",
            OrderStrategy::MinDepth => "min_depth",
        }
    }
}

/// The key that placed a point at its rank.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrderKey {
    DirectionsWon(u32),
    Projection(f64),
    Depth { depth: u32, count: u32 },
}

#[derive(Debug)]
pub struct QueryIndependentOrder {
    strategy: OrderStrategy,
    ell: usize,
    seed: RandomSeed,
    ranked_ids: Vec<u32>,
    keys: Vec<OrderKey>,
    data: Arc<VectorDataset>,
}

impl QueryIndependentOrder {
    pub fn build(
        strategy: OrderStrategy,
        data: Arc<VectorDataset>,
        ell: usize,
        seed: RandomSeed,
    ) -> Result<Self> {
        match strategy {
            OrderStrategy::Extremes => build_extremes(data, ell, seed),
            OrderStrategy::MaxProjection => build_max_projection(data, ell, seed),
            OrderStrategy::MinDepth => build_min_depth(data, ell, seed),
        }
    }

    pub fn strategy(&self) -> OrderStrategy {
        self.strategy
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn seed(&self) -> RandomSeed {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.ranked_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked_ids.is_empty()
    }

    pub fn ranked_ids(&self) -> impl ExactSizeIterator<Item = PointId> + '_ {
        self.ranked_ids.iter().map(|&id| id as PointId)
    }

    pub fn keys(&self) -> &[OrderKey] {
        &self.keys
    }

    pub fn dataset(&self) -> &Arc<VectorDataset> {
        &self.data
    }

    /// Furthest point from `q` among the first `min(m, len)` ranked points.
    pub fn query_prefix(&self, q: &Vector, m: usize) -> Result<QueryResult> {
        let mut scan = self.scan(q)?;
        scan.advance_to(m)
    }

    /// A resumable prefix scan for `q`.
    pub fn scan<'a>(&'a self, q: &'a Vector) -> Result<PrefixScan<'a>> {
        if self.ranked_ids.is_empty() {
            return Err(Error::Degenerate("empty query-independent order".into()));
        }
        self.data.check_query(q)?;
        Ok(PrefixScan {
            order: self,
            query: q,
            position: 0,
            best: None,
        })
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let file = SavedOrder {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            n: self.data.len(),
            dim: self.data.dim(),
            strategy: self.strategy,
            ell: self.ell,
            seed: self.seed,
            ranked_ids: self.ranked_ids.clone(),
            keys: self.keys.clone(),
        };
        serde_json::to_writer(writer, &file).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn load<R: Read>(reader: R, data: Arc<VectorDataset>) -> Result<Self> {
        let file: SavedOrder =
            serde_json::from_reader(reader).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.format != FORMAT_NAME || file.version != FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported order format {} v{}",
                file.format, file.version
            )));
        }
        if file.n != data.len() || file.dim != data.dim() {
            return Err(Error::Serialization("order built for a different dataset".into()));
        }
        if file.ranked_ids.len() != file.keys.len()
            || file.ranked_ids.iter().any(|&id| id as usize >= data.len())
        {
            return Err(Error::Serialization("inconsistent order contents".into()));
        }
        Ok(QueryIndependentOrder {
            strategy: file.strategy,
            ell: file.ell,
            seed: file.seed,
            ranked_ids: file.ranked_ids,
            keys: file.keys,
            data,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedOrder {
    format: String,
    version: u32,
    n: usize,
    dim: usize,
    strategy: OrderStrategy,
    ell: usize,
    seed: RandomSeed,
    ranked_ids: Vec<u32>,
    keys: Vec<OrderKey>,
}

/// State of an in-progress prefix scan.
#[derive(Debug)]
pub struct PrefixScan<'a> {
    order: &'a QueryIndependentOrder,
    query: &'a Vector,
    position: usize,
    best: Option<(PointId, f64)>,
}

impl PrefixScan<'_> {
    /// Extends the scan to the first `min(m, len)` points. Calling again with
    /// a larger `m` continues where the previous call stopped.
    pub fn advance_to(&mut self, m: usize) -> Result<QueryResult> {
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        let end = m.min(self.order.ranked_ids.len());
        while self.position < end {
            let id = self.order.ranked_ids[self.position] as PointId;
            let dist = distance_unchecked(self.order.data.point(id), self.query);
            let better = match self.best {
                None => true,
                Some((best_id, best_dist)) => dist > best_dist || (dist == best_dist && id < best_id),
            };
            if better {
                self.best = Some((id, dist));
            }
            self.position += 1;
        }
        self.result()
    }

    pub fn examined(&self) -> usize {
        self.position
    }

    pub fn result(&self) -> Result<QueryResult> {
        let (point_id, distance) = self
            .best
            .ok_or_else(|| Error::Invariant("prefix scan has not examined any point".into()))?;
        Ok(QueryResult {
            point_id,
            distance,
            candidates_examined: self.position,
        })
    }
}

/// Argmax point per uniform random direction, deduplicated and ranked by the
/// number of directions won (ties toward the smaller id).
pub fn build_extremes(
    data: Arc<VectorDataset>,
    ell: usize,
    seed: RandomSeed,
) -> Result<QueryIndependentOrder> {
    check_ell(ell)?;
    let mut rng = seed.stream(0);
    let mut wins: Vec<(u32, u32)> = Vec::new();
    for _ in 0..ell {
        let y = sample_unit_vector(data.dim(), &mut rng);
        let mut best = (f64::NEG_INFINITY, 0u32);
        for (id, x) in data.iter() {
            let v = dot_unchecked(&y, x);
            if v > best.0 {
                best = (v, id as u32);
            }
        }
        match wins.iter_mut().find(|(id, _)| *id == best.1) {
            Some(entry) => entry.1 += 1,
            None => wins.push((best.1, 1)),
        }
    }
    wins.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(QueryIndependentOrder {
        strategy: OrderStrategy::Extremes,
        ell,
        seed,
        ranked_ids: wins.iter().map(|w| w.0).collect(),
        keys: wins.iter().map(|w| OrderKey::DirectionsWon(w.1)).collect(),
        data,
    })
}

/// Every point keyed by `max_i a_i · x`, sorted descending.
pub fn build_max_projection(
    data: Arc<VectorDataset>,
    ell: usize,
    seed: RandomSeed,
) -> Result<QueryIndependentOrder> {
    check_ell(ell)?;
    let mut rng = seed.stream(0);
    let projections = sample_projections(data.dim(), ell, &mut rng);
    let mut keyed: Vec<(f64, u32)> = data
        .iter()
        .map(|(id, x)| {
            let key = projections
                .iter()
                .map(|a| dot_unchecked(a, x))
                .fold(f64::NEG_INFINITY, f64::max);
            (key, id as u32)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(QueryIndependentOrder {
        strategy: OrderStrategy::MaxProjection,
        ell,
        seed,
        ranked_ids: keyed.iter().map(|k| k.1).collect(),
        keys: keyed.iter().map(|k| OrderKey::Projection(k.0)).collect(),
        data,
    })
}

/// Every point keyed by its minimum rank depth over `ell` Gaussian
/// projections and the number of projections attaining it.
pub fn build_min_depth(
    data: Arc<VectorDataset>,
    ell: usize,
    seed: RandomSeed,
) -> Result<QueryIndependentOrder> {
    check_ell(ell)?;
    let n = data.len();
    let mut rng = seed.stream(0);
    let projections = sample_projections(data.dim(), ell, &mut rng);
    let mut depth = vec![u32::MAX; n];
    let mut count = vec![0u32; n];
    for a in &projections {
        let mut entries = project_all(a, &data);
        entries.sort_unstable_by(|x, y| x.value.total_cmp(&y.value).then(x.id.cmp(&y.id)));
        for (rank, e) in entries.iter().enumerate() {
            let d = rank.min(n - 1 - rank) as u32;
            let i = e.id as usize;
            match d.cmp(&depth[i]) {
                std::cmp::Ordering::Less => {
                    depth[i] = d;
                    count[i] = 1;
                }
                std::cmp::Ordering::Equal => count[i] += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.sort_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        depth[a]
            .cmp(&depth[b])
            .then(count[b].cmp(&count[a]))
            .then(a.cmp(&b))
    });
    let keys = ids
        .iter()
        .map(|&id| OrderKey::Depth {
            depth: depth[id as usize],
            count: count[id as usize],
        })
        .collect();
    Ok(QueryIndependentOrder {
        strategy: OrderStrategy::MinDepth,
        ell,
        seed,
        ranked_ids: ids,
        keys,
        data,
    })
}

fn check_ell(ell: usize) -> Result<()> {
    if ell == 0 {
        return Err(Error::param("ell must be at least 1"));
    }
    Ok(())
}

/// Parameters for the sphere-covering bound that sizes the extremes strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveringParams {
    /// Approximation factor in `(1, 2)`.
    pub c: f64,
    pub d: usize,
    /// The universal constant of the covering bound; unknown, defaults to 1.
    pub gamma: f64,
}

impl CoveringParams {
    pub fn new(c: f64, d: usize) -> Result<Self> {
        Self::with_gamma(c, d, 1.0)
    }

    pub fn with_gamma(c: f64, d: usize, gamma: f64) -> Result<Self> {
        if !(c > 1.0 && c < 2.0) {
            return Err(Error::param(format!("c must lie in (1, 2), got {c}")));
        }
        if d == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::param(format!("gamma must be positive, got {gamma}")));
        }
        Ok(CoveringParams { c, d, gamma })
    }

    /// Half the angle between two unit vectors with dot product `1/c`.
    pub fn phi_c(&self) -> f64 {
        0.5 * (1.0 / self.c).acos()
    }

    pub fn covering_number(&self) -> Result<f64> {
        covering_number(self.phi_c(), self.d, self.gamma)
    }
}

/// Upper bound on the number of caps of angular radius `phi` needed to cover
/// the unit sphere in `d` dimensions:
/// `gamma cos(phi) sin(phi)^-(d+1) (d+1)^(3/2) ln(1 + (d+1) cos^2(phi))`.
///
/// Valid for `0 < phi <= arccos(1/sqrt(d))`.
pub fn covering_number(phi: f64, d: usize, gamma: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::param("dimension must be at least 1"));
    }
    let limit = (1.0 / (d as f64).sqrt()).acos();
    if !(phi > 0.0) || phi > limit + 1e-12 {
        return Err(Error::param(format!(
            "angle {phi} outside (0, arccos(1/sqrt({d}))] = (0, {limit}]"
        )));
    }
    let d1 = (d + 1) as f64;
    let (sin, cos) = phi.sin_cos();
    Ok(gamma * cos * sin.powf(-d1) * d1.powf(1.5) * (1.0 + d1 * cos * cos).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuggestedEll {
    pub ell: usize,
    /// Set when the formula exceeded the cap (or overflowed) and was clamped.
    pub capped: bool,
}

/// `ceil(2 C ln C)` for a covering number `C`, clamped to `[1, cap]`.
pub fn ell_from_covering(covering: f64, cap: usize) -> SuggestedEll {
    let cap = cap.max(1);
    let raw = (2.0 * covering * covering.ln()).ceil();
    if !raw.is_finite() || raw > cap as f64 {
        return SuggestedEll { ell: cap, capped: true };
    }
    SuggestedEll {
        ell: (raw.max(1.0)) as usize,
        capped: false,
    }
}

/// Projection count for the extremes strategy from the covering bound at
/// `phi_c = arccos(1/c) / 2`.
pub fn suggested_ell(params: &CoveringParams, cap: usize) -> Result<SuggestedEll> {
    let covering = params.covering_number()?;
    let suggestion = ell_from_covering(covering, cap);
    if suggestion.capped {
        log::warn!(
            "covering bound {covering:.3e} for c={} d={} exceeds cap {cap}",
            params.c,
            params.d
        );
    }
    Ok(suggestion)
}
