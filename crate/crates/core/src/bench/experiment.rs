//! Grid experiments: approximation factor achieved per `(ell, m)` cell.
//!
//! For every cell and every seed index `s` an index is built from
//! `master.derive([s, 0])` and `queries_per_seed` query points are drawn
//! uniformly (with replacement) from the dataset using
//! `master.derive([s, 1])`. Both depend only on the seed index, so every cell
//! sees the same queries and the same leading projections, and records do not
//! depend on the order in which cells are evaluated. Records are emitted in
//! `(cell, seed, draw)` order.

use std::collections::hash_map::{Entry, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::oracle::brute_furthest;
use super::summary::{summarize, SummaryRow};
use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::query_dependent::{AfnParams, ProjectionIndex, QueryResult};
use crate::query_independent::{OrderStrategy, QueryIndependentOrder};
use crate::random::RandomSeed;

const INDEX_TAG: u64 = 0;
const QUERY_TAG: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    QueryDependent,
    QueryIndependent(OrderStrategy),
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::QueryDependent,
        Variant::QueryIndependent(OrderStrategy::Extremes),
        Variant::QueryIndependent(OrderStrategy::MaxProjection),
        Variant::QueryIndependent(OrderStrategy::MinDepth),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::QueryDependent => "qd",
            Variant::QueryIndependent(OrderStrategy::Extremes) => "qi-extremes",
            Variant::QueryIndependent(OrderStrategy::MaxProjection) => "qi-maxproj",
            Variant::QueryIndependent(OrderStrategy::MinDepth) => "qi-depth",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::param(format!("unknown variant {s:?} (expected qd, qi-extremes, qi-maxproj or qi-depth)")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub dataset_id: String,
    pub variant: Variant,
    /// `(ell, m)` cells in output order.
    pub cells: Vec<(usize, usize)>,
    pub seeds: usize,
    pub queries_per_seed: usize,
    pub master_seed: RandomSeed,
    /// Approximation factor recorded in the query-dependent parameters.
    pub c: f64,
    /// When false the wall time column is written as 0 so that repeated runs
    /// produce byte-identical files.
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    /// Every combination of the two grids, `ell` varying slowest.
    pub fn product_cells(ells: &[usize], ms: &[usize]) -> Vec<(usize, usize)> {
        ells.iter().flat_map(|&l| ms.iter().map(move |&m| (l, m))).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::param("empty (ell, m) grid"));
        }
        if let Some(&(l, m)) = self.cells.iter().find(|&&(l, m)| l == 0 || m == 0) {
            return Err(Error::param(format!("grid cell ell={l}, m={m} must be positive")));
        }
        if self.seeds == 0 || self.queries_per_seed == 0 {
            return Err(Error::param("seeds and queries per seed must be positive"));
        }
        if !(self.c > 1.0) {
            return Err(Error::param(format!("c must be > 1, got {}", self.c)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub variant: String,
    pub ell: usize,
    pub m: usize,
    pub seed: usize,
    /// Dataset id of the point used as the query.
    pub query_id: PointId,
    pub returned_id: PointId,
    pub returned_distance: f64,
    pub true_distance: f64,
    /// `true_distance / returned_distance`, 1 when both are zero.
    pub c_hat: f64,
    pub candidates_examined: usize,
    pub wall_time_ns: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
}

struct Query {
    id: PointId,
    true_distance: f64,
}

pub fn run_experiment(data: &Arc<VectorDataset>, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let n = data.len();

    let queries: Vec<Vec<Query>> = (0..config.seeds)
        .map(|s| {
            let mut rng = config.master_seed.derive(&[s as u64, QUERY_TAG]).stream(0);
            (0..config.queries_per_seed)
                .map(|_| {
                    let id = rng.random_range(0..n);
                    let (_, true_distance) = brute_furthest(data, data.point(id))?;
                    Ok(Query { id, true_distance })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut orders: HashMap<(usize, usize), QueryIndependentOrder> = HashMap::new();
    let mut records = Vec::with_capacity(config.cells.len() * config.seeds * config.queries_per_seed);

    for &(ell, m) in &config.cells {
        for (s, seed_queries) in queries.iter().enumerate() {
            let seed = config.master_seed.derive(&[s as u64, INDEX_TAG]);
            let mut run_query: Box<dyn FnMut(PointId) -> Result<QueryResult> + '_> = match config.variant {
                Variant::QueryDependent => {
                    let params = AfnParams::new(config.c, ell, m.min(n))?;
                    let index = ProjectionIndex::build(Arc::clone(data), params, seed)?;
                    Box::new(move |id| index.query(index.dataset().point(id)))
                }
                Variant::QueryIndependent(strategy) => {
                    let order: &QueryIndependentOrder = match orders.entry((ell, s)) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(QueryIndependentOrder::build(strategy, Arc::clone(data), ell, seed)?),
                    };
                    Box::new(move |id| order.query_prefix(order.dataset().point(id), m))
                }
            };

            for q in seed_queries {
                let start = Instant::now();
                let result = run_query(q.id)?;
                let elapsed = start.elapsed();
                records.push(make_record(config, ell, m, s, q, &result, elapsed.as_nanos() as u64)?);
            }
        }
    }

    let summary = summarize(&records)?;
    Ok(ExperimentOutput { records, summary })
}

fn make_record(
    config: &ExperimentConfig,
    ell: usize,
    m: usize,
    seed: usize,
    q: &Query,
    result: &QueryResult,
    wall_time_ns: u64,
) -> Result<ExperimentRecord> {
    let c_hat = approximation_factor(q.true_distance, result.distance);
    if result.distance > q.true_distance + 1e-9 || c_hat < 1.0 - 1e-12 {
        return Err(Error::Invariant(format!(
            "query {} returned distance {} beyond the true furthest distance {}",
            q.id, result.distance, q.true_distance
        )));
    }
    Ok(ExperimentRecord {
        dataset: config.dataset_id.clone(),
        variant: config.variant.name().to_string(),
        ell,
        m,
        seed,
        query_id: q.id,
        returned_id: result.point_id,
        returned_distance: result.distance,
        true_distance: q.true_distance,
        c_hat,
        candidates_examined: result.candidates_examined,
        wall_time_ns: if config.record_wall_time { wall_time_ns } else { 0 },
    })
}

/// `true / returned`, defined as 1 when both are zero and infinite when only
/// the returned distance is zero.
pub fn approximation_factor(true_distance: f64, returned_distance: f64) -> f64 {
    if true_distance == 0.0 {
        1.0
    } else {
        true_distance / returned_distance
    }
}

pub fn write_records<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for rec in records {
        writer.serialize(rec)?;
    }
    writer.flush().map_err(Error::RawIo)?;
    Ok(())
}

pub fn save_records(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, std::io::BufWriter::new(file))
}
