//! Approximate annulus queries: LSH tables whose buckets hold projection
//! lists.
//!
//! Given `r > 0`, `w > 1` and `c > 1`, a query for `q` must return some point
//! at distance in `[r/(c w), c w r]` whenever a point at distance in
//! `[r/w, w r]` exists. Points are hashed into `L` tables with concatenated
//! Euclidean LSH functions; inside a bucket every point is stored in `ell`
//! lists sorted by its projections `a_i · x`. A query merges the lists of the
//! `L` buckets `q` falls into through one priority queue keyed by
//! `a_i · (x - q)` and returns the first dequeued point inside the annulus,
//! giving up after `m + 3L` distance evaluations.
//!
//! Candidates are not deduplicated across buckets or lists: a point found in
//! two matched buckets may be evaluated twice and each evaluation counts
//! against the cap.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::lsh::{sensitivity_for, BucketKey, ConcatenatedHash, Sensitivity};
use crate::projection::{sample_projections, Entry};
use crate::random::RandomSeed;
use crate::vector::{distance_unchecked, dot_unchecked, Vector};

const FORMAT_NAME: &str = "afn-annulus-index";
const FORMAT_VERSION: u32 = 1;

/// Default cap on the total number of stored list entries (`n * L * ell`).
pub const DEFAULT_ENTRY_BUDGET: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusParams {
    pub r: f64,
    pub w: f64,
    pub c: f64,
    pub bucket_width: f64,
    /// Atoms per concatenated hash.
    pub k: usize,
    /// Number of hash tables `L`.
    pub tables: usize,
    pub ell: usize,
    pub m: usize,
    /// Maximum distance evaluations per query, `m + 3L`.
    pub cap: usize,
}

impl AnnulusParams {
    /// Explicit parameters; `cap` is set to `m + 3 * tables`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: f64,
        w: f64,
        c: f64,
        bucket_width: f64,
        k: usize,
        tables: usize,
        ell: usize,
        m: usize,
    ) -> Result<Self> {
        if !(r > 0.0) || !(w > 1.0) || !(c > 1.0) || !(bucket_width > 0.0) {
            return Err(Error::param(format!(
                "need r > 0, w > 1, c > 1, bucket width > 0; got r={r} w={w} c={c} W={bucket_width}"
            )));
        }
        if k == 0 || tables == 0 || ell == 0 || m == 0 {
            return Err(Error::param("k, L, ell and m must all be at least 1"));
        }
        Ok(AnnulusParams {
            r,
            w,
            c,
            bucket_width,
            k,
            tables,
            ell,
            m,
            cap: m + 3 * tables,
        })
    }

    /// Inner radius of the accepted annulus, `r / (c w)`.
    pub fn inner_radius(&self) -> f64 {
        self.r / (self.c * self.w)
    }

    /// Outer radius of the accepted annulus, `c w r`.
    pub fn outer_radius(&self) -> f64 {
        self.c * self.w * self.r
    }

    pub fn accepts(&self, distance: f64) -> bool {
        distance >= self.inner_radius() && distance <= self.outer_radius()
    }
}

/// Default bucket width `4 w r`.
pub fn default_bucket_width(r: f64, w: f64) -> f64 {
    4.0 * w * r
}

/// `k = ceil(ln n / ln(1/p2))`.
pub fn concatenation_length(n: usize, p2: f64) -> usize {
    ((n as f64).ln() / (1.0 / p2).ln()).ceil().max(1.0) as usize
}

/// `L = ceil(n^rho / p1)`.
pub fn table_count(n: usize, rho: f64, p1: f64) -> usize {
    ((n as f64).powf(rho) / p1).ceil().max(1.0) as usize
}

/// `phi = n^(1/c^2) (ln n)^((1 - 1/c^2)/2)`, the inverse of the lower bound
/// on a far point projecting above the query threshold.
pub fn projection_budget(n: usize, c: f64) -> f64 {
    let nf = n as f64;
    let inv = 1.0 / (c * c);
    nf.powf(inv) * nf.ln().powf((1.0 - inv) / 2.0)
}

/// Parameters from the sensitivity of the hash family:
/// `ell = ceil(2 phi)`, `m = ceil(1 + e^2 ell)`, `k` and `L` as above.
pub fn derive_params(
    n: usize,
    r: f64,
    w: f64,
    c: f64,
    bucket_width: Option<f64>,
) -> Result<(AnnulusParams, Sensitivity)> {
    if n < 2 {
        return Err(Error::param(format!("need n >= 2, got {n}")));
    }
    let width = bucket_width.unwrap_or_else(|| default_bucket_width(r, w));
    let sens = sensitivity_for(r, w, c, width)?;
    let k = concatenation_length(n, sens.p2);
    let tables = table_count(n, sens.rho, sens.p1);
    let ell = (2.0 * projection_budget(n, c)).ceil() as usize;
    let m = (1.0 + std::f64::consts::E.powi(2) * ell as f64).ceil() as usize;
    Ok((AnnulusParams::new(r, w, c, width, k, tables, ell, m)?, sens))
}

/// `ell` lists over one bucket's members, each sorted by `a_i · x`
/// descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    lists: Vec<Vec<Entry>>,
}

impl Bucket {
    pub fn lists(&self) -> &[Vec<Entry>] {
        &self.lists
    }

    pub fn len(&self) -> usize {
        self.lists.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = PointId> + '_ {
        self.lists
            .first()
            .into_iter()
            .flatten()
            .map(Entry::point_id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Found,
    QueueExhausted,
    CapReached,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusOutcome {
    /// The returned point and its distance, or `None` when the query failed.
    pub hit: Option<(PointId, f64)>,
    pub candidates_examined: usize,
    pub stop: StopReason,
}

impl AnnulusOutcome {
    pub fn point_id(&self) -> Option<PointId> {
        self.hit.map(|h| h.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusDequeued {
    pub table: usize,
    pub list: usize,
    pub point_id: PointId,
    pub priority: f64,
    pub distance: f64,
}

#[derive(Debug)]
pub struct AnnulusIndex {
    params: AnnulusParams,
    seed: RandomSeed,
    hashes: Vec<ConcatenatedHash>,
    projections: Vec<Vector>,
    tables: Vec<BTreeMap<BucketKey, Bucket>>,
    data: Arc<VectorDataset>,
}

#[derive(Clone, Copy, Debug)]
struct HeapItem {
    priority: f64,
    table: u32,
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
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.table.cmp(&self.table))
            .then_with(|| other.list.cmp(&self.list))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl AnnulusIndex {
    pub fn build(data: Arc<VectorDataset>, params: AnnulusParams, seed: RandomSeed) -> Result<Self> {
        Self::build_with_budget(data, params, seed, DEFAULT_ENTRY_BUDGET)
    }

    /// Builds the index, refusing when `n * L * ell` list entries would exceed
    /// `entry_budget`.
    pub fn build_with_budget(
        data: Arc<VectorDataset>,
        params: AnnulusParams,
        seed: RandomSeed,
        entry_budget: u64,
    ) -> Result<Self> {
        let required = (data.len() as u64)
            .saturating_mul(params.tables as u64)
            .saturating_mul(params.ell as u64);
        if required > entry_budget {
            return Err(Error::BudgetExceeded {
                required,
                budget: entry_budget,
            });
        }

        let mut rng = seed.stream(0);
        let hashes = (0..params.tables)
            .map(|_| ConcatenatedHash::sample(data.dim(), params.k, params.bucket_width, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let projections = sample_projections(data.dim(), params.ell, &mut rng);

        let values: Vec<Vec<f64>> = data
            .points()
            .iter()
            .map(|x| projections.iter().map(|a| dot_unchecked(a, x)).collect())
            .collect();

        let tables = hashes
            .iter()
            .map(|g| {
                let mut members: BTreeMap<BucketKey, Vec<u32>> = BTreeMap::new();
                for (id, x) in data.iter() {
                    members.entry(g.hash_unchecked(x)).or_default().push(id as u32);
                }
                members
                    .into_iter()
                    .map(|(key, ids)| {
                        let lists = (0..params.ell)
                            .map(|i| {
                                let mut list: Vec<Entry> = ids
                                    .iter()
                                    .map(|&id| Entry {
                                        value: values[id as usize][i],
                                        id,
                                    })
                                    .collect();
                                list.sort_unstable_by(Entry::descending);
                                list
                            })
                            .collect();
                        (key, Bucket { lists })
                    })
                    .collect()
            })
            .collect();

        Ok(AnnulusIndex {
            params,
            seed,
            hashes,
            projections,
            tables,
            data,
        })
    }

    pub fn params(&self) -> &AnnulusParams {
        &self.params
    }

    pub fn seed(&self) -> RandomSeed {
        self.seed
    }

    pub fn hashes(&self) -> &[ConcatenatedHash] {
        &self.hashes
    }

    pub fn projections(&self) -> &[Vector] {
        &self.projections
    }

    pub fn tables(&self) -> &[BTreeMap<BucketKey, Bucket>] {
        &self.tables
    }

    pub fn dataset(&self) -> &Arc<VectorDataset> {
        &self.data
    }

    pub fn query(&self, q: &Vector) -> Result<AnnulusOutcome> {
        self.run(q, self.params.cap, None)
    }

    /// Query with an explicit distance-evaluation budget instead of `m + 3L`.
    pub fn query_with_cap(&self, q: &Vector, cap: usize) -> Result<AnnulusOutcome> {
        if cap == 0 {
            return Err(Error::param("candidate cap must be at least 1"));
        }
        self.run(q, cap, None)
    }

    pub fn query_trace(&self, q: &Vector) -> Result<(AnnulusOutcome, Vec<AnnulusDequeued>)> {
        let mut trace = Vec::new();
        let outcome = self.run(q, self.params.cap, Some(&mut trace))?;
        Ok((outcome, trace))
    }

    fn run(
        &self,
        q: &Vector,
        cap: usize,
        mut trace: Option<&mut Vec<AnnulusDequeued>>,
    ) -> Result<AnnulusOutcome> {
        self.data.check_query(q)?;
        let q_proj: Vec<f64> = self.projections.iter().map(|a| dot_unchecked(a, q)).collect();

        let matched: Vec<Option<&Bucket>> = self
            .hashes
            .iter()
            .zip(&self.tables)
            .map(|(g, table)| table.get(&g.hash_unchecked(q)))
            .collect();

        let mut heap = BinaryHeap::new();
        for (j, bucket) in matched.iter().enumerate() {
            let Some(bucket) = bucket else { continue };
            for (i, list) in bucket.lists.iter().enumerate() {
                if let Some(head) = list.first() {
                    heap.push(HeapItem {
                        priority: head.value - q_proj[i],
                        table: j as u32,
                        list: i as u32,
                        pos: 0,
                        id: head.id,
                    });
                }
            }
        }

        let mut examined = 0;
        while let Some(item) = heap.pop() {
            examined += 1;
            let id = item.id as PointId;
            let dist = distance_unchecked(self.data.point(id), q);
            if let Some(t) = trace.as_deref_mut() {
                t.push(AnnulusDequeued {
                    table: item.table as usize,
                    list: item.list as usize,
                    point_id: id,
                    priority: item.priority,
                    distance: dist,
                });
            }
            if self.params.accepts(dist) {
                return Ok(AnnulusOutcome {
                    hit: Some((id, dist)),
                    candidates_examined: examined,
                    stop: StopReason::Found,
                });
            }
            if examined >= cap {
                return Ok(AnnulusOutcome {
                    hit: None,
                    candidates_examined: examined,
                    stop: StopReason::CapReached,
                });
            }
            let bucket = matched[item.table as usize].expect("dequeued from a matched bucket");
            let list = &bucket.lists[item.list as usize];
            let next = item.pos as usize + 1;
            if let Some(e) = list.get(next) {
                heap.push(HeapItem {
                    priority: e.value - q_proj[item.list as usize],
                    table: item.table,
                    list: item.list,
                    pos: next as u32,
                    id: e.id,
                });
            }
        }
        Ok(AnnulusOutcome {
            hit: None,
            candidates_examined: examined,
            stop: StopReason::QueueExhausted,
        })
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let file = SavedAnnulus {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            n: self.data.len(),
            dim: self.data.dim(),
            seed: self.seed,
            params: self.params,
            hashes: self.hashes.clone(),
            projections: self.projections.clone(),
            tables: self
                .tables
                .iter()
                .map(|t| t.iter().map(|(k, b)| (k.clone(), b.clone())).collect())
                .collect(),
        };
        serde_json::to_writer(writer, &file).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn load<R: Read>(reader: R, data: Arc<VectorDataset>) -> Result<Self> {
        let file: SavedAnnulus =
            serde_json::from_reader(reader).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.format != FORMAT_NAME || file.version != FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported annulus index format {} v{}",
                file.format, file.version
            )));
        }
        if file.n != data.len() || file.dim != data.dim() {
            return Err(Error::Serialization("index built for a different dataset".into()));
        }
        let consistent = file.hashes.len() == file.params.tables
            && file.tables.len() == file.params.tables
            && file.projections.len() == file.params.ell
            && file.hashes.iter().all(|g| g.dim() == data.dim() && g.k() == file.params.k)
            && file.tables.iter().flatten().all(|(key, b)| {
                key.len() == file.params.k
                    && b.lists.len() == file.params.ell
                    && b.lists.iter().flatten().all(|e| e.point_id() < data.len())
            });
        if !consistent {
            return Err(Error::Serialization("inconsistent annulus index contents".into()));
        }
        Ok(AnnulusIndex {
            params: file.params,
            seed: file.seed,
            hashes: file.hashes,
            projections: file.projections,
            tables: file
                .tables
                .into_iter()
                .map(|t| t.into_iter().collect())
                .collect(),
            data,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedAnnulus {
    format: String,
    version: u32,
    n: usize,
    dim: usize,
    seed: RandomSeed,
    params: AnnulusParams,
    hashes: Vec<ConcatenatedHash>,
    projections: Vec<Vector>,
    tables: Vec<Vec<(BucketKey, Bucket)>>,
}
