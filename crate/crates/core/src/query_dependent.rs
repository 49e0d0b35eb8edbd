//! Query-dependent approximate furthest neighbor index.
//!
//! The index keeps `ell` Gaussian projection vectors `a_i` and, for each one,
//! the `m` points with the largest `a_i · x` sorted in decreasing order. A
//! query walks all lists at once through a max-priority queue keyed by the
//! projection margin `a_i · x - a_i · q` and measures true distances for the
//! first `m` entries it dequeues. The best of those is returned.
//!
//! With `ell = 2 n^(1/c^2)` and `m = 1 + e^2 ell ln^(c^2/2 - 1/3) n` the
//! returned point is a `c`-approximate furthest neighbor with probability at
//! least `1 - 2/e^2`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::projection::{project_all, sample_projections, top_m, Entry};
use crate::random::RandomSeed;
use crate::vector::{distance_unchecked, dot_unchecked, Vector};

const FORMAT_NAME: &str = "afn-projection-index";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AfnParams {
    /// Target approximation factor, `> 1`.
    pub c: f64,
    /// Number of projection vectors.
    pub ell: usize,
    /// Candidates examined per query.
    pub m: usize,
}

impl AfnParams {
    pub fn new(c: f64, ell: usize, m: usize) -> Result<Self> {
        if !(c > 1.0) || !c.is_finite() {
            return Err(Error::param(format!("approximation factor c must be > 1, got {c}")));
        }
        if ell == 0 {
            return Err(Error::param("ell must be at least 1"));
        }
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        Ok(AfnParams { c, ell, m })
    }
}

/// `ell = ceil(2 n^(1/c^2))`, `m = min(n, ceil(1 + e^2 ell (ln n)^(c^2/2 - 1/3)))`.
pub fn default_params(n: usize, c: f64) -> Result<AfnParams> {
    if n < 2 {
        return Err(Error::param(format!("need n >= 2, got {n}")));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::param(format!("approximation factor c must be > 1, got {c}")));
    }
    let nf = n as f64;
    let c2 = c * c;
    let ell = (2.0 * nf.powf(1.0 / c2)).ceil();
    let m = (1.0 + std::f64::consts::E.powi(2) * ell * nf.ln().powf(c2 / 2.0 - 1.0 / 3.0)).ceil();
    AfnParams::new(c, ell as usize, (m.min(nf)) as usize)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryResult {
    pub point_id: PointId,
    pub distance: f64,
    pub candidates_examined: usize,
}

/// One dequeue of the query loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dequeued {
    pub list: usize,
    pub point_id: PointId,
    pub key: f64,
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct QueryTrace {
    pub result: QueryResult,
    pub dequeued: Vec<Dequeued>,
}

#[derive(Debug)]
pub struct ProjectionIndex {
    params: AfnParams,
    seed: RandomSeed,
    projections: Vec<Vector>,
    lists: Vec<Vec<Entry>>,
    data: Arc<VectorDataset>,
}

#[derive(Clone, Copy, Debug)]
struct HeapItem {
    key: f64,
    list: u32,
    pos: u32,
    id: u32,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Max-heap on key; equal keys pop the smaller list index, then smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.list.cmp(&self.list))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl ProjectionIndex {
    pub fn build(data: Arc<VectorDataset>, params: AfnParams, seed: RandomSeed) -> Result<Self> {
        let mut rng = seed.stream(0);
        let projections = sample_projections(data.dim(), params.ell, &mut rng);
        let lists = projections
            .iter()
            .map(|a| top_m(project_all(a, &data), params.m))
            .collect();
        Ok(ProjectionIndex {
            params,
            seed,
            projections,
            lists,
            data,
        })
    }

    pub fn params(&self) -> &AfnParams {
        &self.params
    }

    pub fn seed(&self) -> RandomSeed {
        self.seed
    }

    pub fn projections(&self) -> &[Vector] {
        &self.projections
    }

    pub fn lists(&self) -> &[Vec<Entry>] {
        &self.lists
    }

    pub fn dataset(&self) -> &Arc<VectorDataset> {
        &self.data
    }

    pub fn query(&self, q: &Vector) -> Result<QueryResult> {
        self.run(q, None, false, None)
    }

    /// Like [`query`](Self::query) but stops at the first candidate whose
    /// distance reaches `r / c`.
    pub fn query_with_radius(&self, q: &Vector, r: f64, c: f64) -> Result<QueryResult> {
        if !(r > 0.0) {
            return Err(Error::param(format!("radius must be > 0, got {r}")));
        }
        if !(c > 0.0) {
            return Err(Error::param(format!("c must be > 0, got {c}")));
        }
        self.run(q, Some(r / c), false, None)
    }

    /// Variant of [`query`](Self::query) in which a point dequeued again from
    /// another list is skipped without being evaluated or counted, so `m`
    /// bounds the number of distinct candidates. With `m = n` every point is
    /// examined and the answer is exact.
    pub fn query_distinct(&self, q: &Vector) -> Result<QueryResult> {
        self.run(q, None, true, None)
    }

    /// Runs the query and records every dequeue in order.
    pub fn query_trace(&self, q: &Vector) -> Result<QueryTrace> {
        let mut dequeued = Vec::new();
        let result = self.run(q, None, false, Some(&mut dequeued))?;
        Ok(QueryTrace { result, dequeued })
    }

    fn run(
        &self,
        q: &Vector,
        stop_at: Option<f64>,
        distinct: bool,
        mut trace: Option<&mut Vec<Dequeued>>,
    ) -> Result<QueryResult> {
        self.data.check_query(q)?;
        let q_proj: Vec<f64> = self.projections.iter().map(|a| dot_unchecked(a, q)).collect();

        let mut heap = BinaryHeap::with_capacity(self.lists.len());
        for (i, list) in self.lists.iter().enumerate() {
            if let Some(head) = list.first() {
                heap.push(HeapItem {
                    key: head.value - q_proj[i],
                    list: i as u32,
                    pos: 0,
                    id: head.id,
                });
            }
        }

        let mut best: Option<(PointId, f64)> = None;
        let mut examined = 0;
        let mut seen = HashSet::new();
        while examined < self.params.m {
            let Some(item) = heap.pop() else { break };
            let id = item.id as PointId;
            if distinct && !seen.insert(item.id) {
                self.push_successor(&mut heap, &item, &q_proj);
                continue;
            }
            examined += 1;
            let dist = distance_unchecked(self.data.point(id), q);
            if let Some(t) = trace.as_deref_mut() {
                t.push(Dequeued {
                    list: item.list as usize,
                    point_id: id,
                    key: item.key,
                    distance: dist,
                });
            }
            if best.is_none_or(|(_, d)| dist > d) {
                best = Some((id, dist));
            }
            if stop_at.is_some_and(|target| dist >= target) {
                break;
            }
            self.push_successor(&mut heap, &item, &q_proj);
        }

        let (point_id, distance) = best.ok_or_else(|| {
            Error::Invariant("query examined no candidates".into())
        })?;
        Ok(QueryResult {
            point_id,
            distance,
            candidates_examined: examined,
        })
    }

    fn push_successor(&self, heap: &mut BinaryHeap<HeapItem>, item: &HeapItem, q_proj: &[f64]) {
        let next = item.pos as usize + 1;
        if let Some(e) = self.lists[item.list as usize].get(next) {
            heap.push(HeapItem {
                key: e.value - q_proj[item.list as usize],
                list: item.list,
                pos: next as u32,
                id: e.id,
            });
        }
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let file = SavedIndex {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            n: self.data.len(),
            dim: self.data.dim(),
            seed: self.seed,
            params: self.params,
            projections: self.projections.clone(),
            lists: self.lists.clone(),
        };
        serde_json::to_writer(writer, &file).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Restores an index written by [`save`](Self::save) over the same dataset.
    pub fn load<R: Read>(reader: R, data: Arc<VectorDataset>) -> Result<Self> {
        let file: SavedIndex =
            serde_json::from_reader(reader).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.format != FORMAT_NAME || file.version != FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported index format {} v{}",
                file.format, file.version
            )));
        }
        if file.n != data.len() || file.dim != data.dim() {
            return Err(Error::Serialization(format!(
                "index built for {} points in {} dimensions, dataset has {} in {}",
                file.n,
                file.dim,
                data.len(),
                data.dim()
            )));
        }
        if file.projections.len() != file.lists.len()
            || file.projections.iter().any(|p| p.dim() != data.dim())
            || file.lists.iter().flatten().any(|e| e.point_id() >= data.len())
        {
            return Err(Error::Serialization("inconsistent index contents".into()));
        }
        Ok(ProjectionIndex {
            params: file.params,
            seed: file.seed,
            projections: file.projections,
            lists: file.lists,
            data,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedIndex {
    format: String,
    version: u32,
    n: usize,
    dim: usize,
    seed: RandomSeed,
    params: AfnParams,
    projections: Vec<Vector>,
    lists: Vec<Vec<Entry>>,
}
