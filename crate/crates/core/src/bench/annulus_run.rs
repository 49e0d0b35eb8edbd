//! Success-rate experiments for the annulus index.
//!
//! A trial is one index build answering one query. It is *witnessed* when
//! brute force finds a point in `A(q, r, w)`; it *succeeds* when it is
//! witnessed and the index returns a point in `A(q, r, c w)`. A returned point
//! outside `A(q, r, c w)` is a soundness violation, whether or not the trial
//! was witnessed.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::oracle::brute_annulus;
use crate::annulus::{derive_params, AnnulusIndex, AnnulusParams};
use crate::dataset::{PointId, VectorDataset};
use crate::error::{Error, Result};
use crate::lsh::Sensitivity;
use crate::random::{sample_unit_vector, RandomSeed};
use crate::vector::Vector;

/// A dataset with one point at distance exactly `r` from `query` and every
/// other point either within `r / (2 c w)` or between `2 c w r` and
/// `4 c w r`, so that the witness is the only point of `A(q, r, c w)`.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub data: Arc<VectorDataset>,
    pub query: Vector,
    pub witness: PointId,
}

pub fn plant_annulus_instance(
    n: usize,
    d: usize,
    r: f64,
    w: f64,
    c: f64,
    seed: RandomSeed,
) -> Result<PlantedInstance> {
    if n < 2 || d == 0 {
        return Err(Error::param(format!("planted instance needs n >= 2 and d >= 1, got n={n} d={d}")));
    }
    if !(r > 0.0) || !(w > 1.0) || !(c > 1.0) {
        return Err(Error::param(format!("need r > 0, w > 1, c > 1; got r={r} w={w} c={c}")));
    }
    let mut rng = seed.stream(0);
    let witness = rng.random_range(0..n);
    let near = r / (2.0 * c * w);
    let far = 2.0 * c * w * r;
    let points = (0..n)
        .map(|i| {
            let dist = if i == witness {
                r
            } else if rng.random_bool(0.5) {
                rng.random::<f64>() * near
            } else {
                far + rng.random::<f64>() * far
            };
            sample_unit_vector(d, &mut rng).scale(dist)
        })
        .collect();
    Ok(PlantedInstance {
        data: Arc::new(VectorDataset::new(points)?),
        query: Vector::Dense(vec![0.0; d]),
        witness,
    })
}

#[derive(Clone, Debug)]
pub enum AnnulusWorkload {
    /// A fresh planted instance of `n` points in `d` dimensions per trial.
    Planted { n: usize, d: usize },
    /// A fixed dataset; queries are drawn uniformly from its points.
    Dataset(Arc<VectorDataset>),
}

#[derive(Clone, Debug)]
pub struct AnnulusExperimentConfig {
    pub r: f64,
    pub w: f64,
    pub c: f64,
    /// Bucket width; `None` uses the default `4 w r`.
    pub bucket_width: Option<f64>,
    /// Independent index builds.
    pub builds: usize,
    /// Queries per build. Planted workloads always use the planted query, once
    /// per build.
    pub queries: usize,
    pub master_seed: RandomSeed,
    /// Independent indexes per trial for the amplified success rate.
    pub repetitions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusReport {
    pub params: AnnulusParams,
    pub sensitivity: Sensitivity,
    pub trials: usize,
    pub witnessed: usize,
    pub successes: usize,
    pub nulls: usize,
    pub soundness_violations: usize,
    pub mean_candidates: f64,
    /// `successes / witnessed` for the first index of each trial.
    pub success_rate: f64,
    pub null_rate: f64,
    /// Fraction of witnessed trials where any of the `repetitions` indexes
    /// succeeded.
    pub amplified_success_rate: f64,
    pub repetitions: usize,
}

#[derive(Serialize)]
struct ReportRow {
    r: f64,
    w: f64,
    c: f64,
    bucket_width: f64,
    k: usize,
    tables: usize,
    ell: usize,
    m: usize,
    cap: usize,
    lsh_rho: f64,
    trials: usize,
    witnessed: usize,
    successes: usize,
    nulls: usize,
    soundness_violations: usize,
    mean_candidates: f64,
    success_rate: f64,
    null_rate: f64,
    repetitions: usize,
    amplified_success_rate: f64,
}

impl AnnulusReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let p = &self.params;
        let mut writer = csv::Writer::from_writer(out);
        writer.serialize(ReportRow {
            r: p.r,
            w: p.w,
            c: p.c,
            bucket_width: p.bucket_width,
            k: p.k,
            tables: p.tables,
            ell: p.ell,
            m: p.m,
            cap: p.cap,
            lsh_rho: self.sensitivity.rho,
            trials: self.trials,
            witnessed: self.witnessed,
            successes: self.successes,
            nulls: self.nulls,
            soundness_violations: self.soundness_violations,
            mean_candidates: self.mean_candidates,
            success_rate: self.success_rate,
            null_rate: self.null_rate,
            repetitions: self.repetitions,
            amplified_success_rate: self.amplified_success_rate,
        })?;
        writer.flush().map_err(Error::RawIo)?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

#[derive(Default)]
struct Tally {
    trials: usize,
    witnessed: usize,
    successes: usize,
    amplified: usize,
    nulls: usize,
    violations: usize,
    candidates: usize,
}

impl Tally {
    /// Records one trial answered by `indexes` (the first is the primary one).
    fn record(&mut self, indexes: &[AnnulusIndex], q: &Vector, params: &AnnulusParams) -> Result<()> {
        let data = indexes[0].dataset();
        let witnessed = brute_annulus(data, q, params.r, params.w)?.is_some();
        self.trials += 1;
        if witnessed {
            self.witnessed += 1;
        }
        let mut any_success = false;
        for (i, index) in indexes.iter().enumerate() {
            let outcome = index.query(q)?;
            let sound_hit = match outcome.hit {
                Some((id, _)) => {
                    // Recompute rather than trust the reported distance.
                    let dist = data.point(id).l2_distance(q)?;
                    if !params.accepts(dist) {
                        self.violations += 1;
                    }
                    params.accepts(dist)
                }
                None => false,
            };
            if i == 0 {
                self.candidates += outcome.candidates_examined;
                if outcome.hit.is_none() {
                    self.nulls += 1;
                }
                if witnessed && sound_hit {
                    self.successes += 1;
                }
            }
            any_success |= witnessed && sound_hit;
        }
        if any_success {
            self.amplified += 1;
        }
        Ok(())
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn run_annulus_experiment(
    workload: &AnnulusWorkload,
    config: &AnnulusExperimentConfig,
) -> Result<AnnulusReport> {
    if config.builds == 0 || config.queries == 0 || config.repetitions == 0 {
        return Err(Error::param("builds, queries and repetitions must be positive"));
    }
    let n = match workload {
        AnnulusWorkload::Planted { n, .. } => *n,
        AnnulusWorkload::Dataset(data) => data.len(),
    };
    let (params, sensitivity) = derive_params(n, config.r, config.w, config.c, config.bucket_width)?;
    let master = config.master_seed;
    let build_all = |data: &Arc<VectorDataset>, b: usize| -> Result<Vec<AnnulusIndex>> {
        (0..config.repetitions)
            .map(|rep| AnnulusIndex::build(Arc::clone(data), params, master.derive(&[b as u64, 1, rep as u64])))
            .collect()
    };

    let mut tally = Tally::default();
    for b in 0..config.builds {
        match workload {
            AnnulusWorkload::Planted { n, d } => {
                let inst = plant_annulus_instance(*n, *d, config.r, config.w, config.c, master.derive(&[b as u64, 0]))?;
                let indexes = build_all(&inst.data, b)?;
                tally.record(&indexes, &inst.query, &params)?;
            }
            AnnulusWorkload::Dataset(data) => {
                let indexes = build_all(data, b)?;
                let mut rng = master.derive(&[b as u64, 2]).stream(0);
                for _ in 0..config.queries {
                    let q = data.point(rng.random_range(0..data.len())).clone();
                    tally.record(&indexes, &q, &params)?;
                }
            }
        }
    }

    Ok(AnnulusReport {
        params,
        sensitivity,
        trials: tally.trials,
        witnessed: tally.witnessed,
        successes: tally.successes,
        nulls: tally.nulls,
        soundness_violations: tally.violations,
        mean_candidates: ratio(tally.candidates, tally.trials),
        success_rate: ratio(tally.successes, tally.witnessed),
        null_rate: ratio(tally.nulls, tally.trials),
        amplified_success_rate: ratio(tally.amplified, tally.witnessed),
        repetitions: config.repetitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_geometry() {
        let (r, w, c) = (1.0, 2.0, 3.0);
        let inst = plant_annulus_instance(500, 4, r, w, c, RandomSeed(9)).unwrap();
        let outer = c * w * r;
        let inner = r / (c * w);
        for (id, x) in inst.data.iter() {
            let dist = x.l2_distance(&inst.query).unwrap();
            if id == inst.witness {
                assert!((dist - r).abs() < 1e-12);
            } else {
                assert!(dist < inner || dist > outer, "point {id} at {dist}");
            }
        }
        assert_eq!(brute_annulus(&inst.data, &inst.query, r, w).unwrap(), Some(inst.witness));
    }

    #[test]
    fn planted_instances_differ_by_seed() {
        let a = plant_annulus_instance(50, 3, 1.0, 2.0, 3.0, RandomSeed(1)).unwrap();
        let b = plant_annulus_instance(50, 3, 1.0, 2.0, 3.0, RandomSeed(2)).unwrap();
        assert_ne!(a.data.points(), b.data.points());
        assert!(plant_annulus_instance(1, 3, 1.0, 2.0, 3.0, RandomSeed(1)).is_err());
    }

    #[test]
    fn small_planted_run() {
        let cfg = AnnulusExperimentConfig {
            r: 1.0,
            w: 2.0,
            c: 3.0,
            bucket_width: None,
            builds: 5,
            queries: 1,
            master_seed: RandomSeed(4),
            repetitions: 2,
        };
        let rep = run_annulus_experiment(&AnnulusWorkload::Planted { n: 300, d: 5 }, &cfg).unwrap();
        assert_eq!(rep.trials, 5);
        assert_eq!(rep.witnessed, 5);
        assert_eq!(rep.soundness_violations, 0);
        assert!(rep.mean_candidates <= rep.params.cap as f64);
        assert!(rep.amplified_success_rate >= rep.success_rate);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
