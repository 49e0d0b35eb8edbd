//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 2 and 3 cannot be met as stated (see the notes printed with them);
//! they are still evaluated at their stated tolerances and reported as FAIL,
//! while the facts that explain the failure are asserted. Any other failure
//! makes the target exit non-zero.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use afn::bench::experiment::write_records;
use afn::bench::{
    brute_furthest, lemma3_montecarlo, rho_statistic, run_annulus_experiment, run_experiment,
    AnnulusExperimentConfig, AnnulusWorkload, ExperimentConfig, ExperimentRecord, Variant,
};
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::lsh::{collision_probability, HashAtom};
use afn::random::sample_unit_vector;
use afn::{default_params, AfnParams, OrderStrategy, ProjectionIndex, RandomSeed, Vector, VectorDataset};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Criterion known to be unattainable; a FAIL here does not fail the run.
    known_unattainable: bool,
}

fn dataset(kind: Distribution, n: usize, d: usize, seed: u64) -> Arc<VectorDataset> {
    Arc::new(generate(&GeneratorSpec { kind, n, d, seed }).unwrap())
}

fn csv_bytes(records: &[ExperimentRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(records, &mut buf).unwrap();
    buf
}

fn medians(records: &[ExperimentRecord]) -> BTreeMap<(usize, usize), f64> {
    let out = afn::bench::summarize(records).unwrap();
    out.into_iter().map(|r| ((r.ell, r.m), r.median)).collect()
}

/// Success probability with default parameters. Returns the record CSV for
/// the determinism check.
fn criterion_1() -> (Outcome, Vec<u8>) {
    let c = 1.5;
    let data = dataset(Distribution::MultivariateNormal, 1000, 10, 1);
    let p = default_params(1000, c).unwrap();
    let config = ExperimentConfig {
        dataset_id: "normal-1000".into(),
        variant: Variant::QueryDependent,
        cells: vec![(p.ell, p.m)],
        seeds: 20,
        queries_per_seed: 50,
        master_seed: RandomSeed(1),
        c,
        record_wall_time: false,
    };
    let records = run_experiment(&data, &config).unwrap().records;
    let ok = records.iter().filter(|r| r.returned_distance >= r.true_distance / c).count();
    let rate = ok as f64 / records.len() as f64;
    (
        Outcome {
            pass: records.len() == 1000 && rate >= 0.70,
            detail: format!("ell={} m={} success {ok}/{} = {rate:.3} (need >= 0.70)", p.ell, p.m, records.len()),
            known_unattainable: false,
        },
        csv_bytes(&records),
    )
}

/// Saturation: m = n, ell = 8 against brute force.
fn criterion_2() -> Outcome {
    let mut rng = RandomSeed(2).stream(0);
    let (mut queries, mut mismatches, mut distinct_mismatches, mut unexplained) = (0, 0, 0, 0);
    for inst in 0..20u64 {
        let n = rng.random_range(20..=200);
        let d = rng.random_range(2..=10);
        let data = dataset(Distribution::MultivariateNormal, n, d, 100 + inst);
        let idx = ProjectionIndex::build(Arc::clone(&data), AfnParams::new(2.0, 8, n).unwrap(), RandomSeed(200 + inst))
            .unwrap();
        for qid in 0..n {
            let q = data.point(qid);
            let (exact, _) = brute_furthest(&data, q).unwrap();
            queries += 1;
            let trace = idx.query_trace(q).unwrap();
            if trace.result.point_id != exact {
                mismatches += 1;
                // A miss is only possible when the m dequeues never reached it.
                if trace.dequeued.iter().any(|s| s.point_id == exact) {
                    unexplained += 1;
                }
            }
            if idx.query_distinct(q).unwrap().point_id != exact {
                distinct_mismatches += 1;
            }
        }
    }
    assert_eq!(unexplained, 0, "a dequeued furthest point was not returned");
    assert_eq!(distinct_mismatches, 0, "distinct-candidate query is not exact at m = n");
    Outcome {
        pass: mismatches == 0,
        detail: format!(
            "{mismatches}/{queries} queries differ from brute force (need 0); \
             m = n dequeues include repeats across the 8 lists, so some points are never examined; \
             distinct-candidate query: {distinct_mismatches}/{queries} differ"
        ),
        known_unattainable: true,
    }
}

/// Projection tail rates.
fn criterion_3() -> Outcome {
    let n = 10_000;
    let rep = lemma3_montecarlo(n, 2f64.sqrt(), 1_000_000, RandomSeed(3)).unwrap();
    let far_ok = rep.far_rate >= 0.9 * rep.far_bound;
    let near_limit = 1.1 * rep.near_bound;
    let near_ok = rep.near_rate <= near_limit;
    let se = |p: f64| (p * (1.0 - p) / rep.trials as f64).sqrt();
    assert!(far_ok, "far-point rate {} below {}", rep.far_rate, 0.9 * rep.far_bound);
    assert!((rep.near_rate - rep.near_exact).abs() <= 5.0 * se(rep.near_exact));
    assert!((rep.far_rate - rep.far_exact).abs() <= 5.0 * se(rep.far_exact));
    // The exact near-point tail already exceeds the limit at this n.
    assert!(rep.near_exact > near_limit);
    Outcome {
        pass: far_ok && near_ok,
        detail: format!(
            "t={:.6} far {:.5} >= {:.5}: {}; near {:.3e} <= {:.3e}: {} (exact Gaussian tail {:.3e} exceeds the limit at n=1e4)",
            rep.t,
            rep.far_rate,
            0.9 * rep.far_bound,
            far_ok,
            rep.near_rate,
            near_limit,
            near_ok,
            rep.near_exact
        ),
        known_unattainable: true,
    }
}

fn criterion_4() -> Outcome {
    let data = dataset(Distribution::MultivariateNormal, 10_000, 10, 4);
    let rho = rho_statistic(&data, 100_000, RandomSeed(4)).unwrap();
    let rel = (rho - 9.768).abs() / 9.768;
    Outcome {
        pass: rel <= 0.05,
        detail: format!("rho = {rho:.4}, relative error {rel:.4} (need <= 0.05)"),
        known_unattainable: false,
    }
}

/// Median trends over ell = m. Returns record CSVs for the determinism check.
fn criterion_5() -> (Outcome, Vec<u8>) {
    let grid = [1usize, 5, 10, 20, 30];
    let mut pass = true;
    let mut details = Vec::new();
    let mut bytes = Vec::new();
    let mut qd_normal = BTreeMap::new();
    let mut qi_normal = BTreeMap::new();
    for (name, kind) in [("uniform", Distribution::UniformCube), ("normal", Distribution::MultivariateNormal)] {
        let data = dataset(kind, 10_000, 10, 5);
        for variant in [Variant::QueryDependent, Variant::QueryIndependent(OrderStrategy::MaxProjection)] {
            let config = ExperimentConfig {
                dataset_id: name.into(),
                variant,
                cells: grid.iter().map(|&g| (g, g)).collect(),
                seeds: 20,
                queries_per_seed: 10,
                master_seed: RandomSeed(5),
                c: 2.0,
                record_wall_time: false,
            };
            let records = run_experiment(&data, &config).unwrap().records;
            bytes.extend(csv_bytes(&records));
            let med = medians(&records);
            let series: Vec<f64> = grid.iter().map(|&g| med[&(g, g)]).collect();
            let monotone = series.windows(2).all(|w| w[1] <= w[0]);
            let drop = series[4] < series[0];
            pass &= monotone && drop;
            details.push(format!(
                "{name}/{variant}: [{}] {}",
                series.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "),
                if monotone && drop { "ok" } else { "not non-increasing" }
            ));
            if name == "normal" {
                match variant {
                    Variant::QueryDependent => qd_normal = med,
                    _ => qi_normal = med,
                }
            }
        }
    }
    // Soft gate: query-dependent no worse than max-projection plus 0.05.
    let soft = grid.iter().all(|&g| qd_normal[&(g, g)] <= qi_normal[&(g, g)] + 0.05);
    details.push(format!("qd <= qi-maxproj + 0.05 on normal: {soft}"));
    (
        Outcome { pass, detail: details.join("; "), known_unattainable: false },
        bytes,
    )
}

/// Flatness along ell * m = 48.
fn criterion_6() -> (Outcome, Vec<u8>) {
    let data = dataset(Distribution::MultivariateNormal, 10_000, 10, 6);
    let cells: Vec<(usize, usize)> = [2usize, 4, 6, 8, 12].iter().map(|&m| (48 / m, m)).collect();
    let config = ExperimentConfig {
        dataset_id: "normal".into(),
        variant: Variant::QueryDependent,
        cells: cells.clone(),
        seeds: 20,
        queries_per_seed: 10,
        master_seed: RandomSeed(6),
        c: 2.0,
        record_wall_time: false,
    };
    let records = run_experiment(&data, &config).unwrap().records;
    let med = medians(&records);
    let values: Vec<f64> = cells.iter().map(|c| med[c]).collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    (
        Outcome {
            pass: spread <= 0.1,
            detail: format!(
                "medians [{}], spread {spread:.4} (need <= 0.1)",
                values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
            ),
            known_unattainable: false,
        },
        csv_bytes(&records),
    )
}

fn criterion_7() -> Outcome {
    let config = AnnulusExperimentConfig {
        r: 1.0,
        w: 2.0,
        c: 3.0,
        bucket_width: None,
        builds: 200,
        queries: 1,
        master_seed: RandomSeed(7),
        repetitions: 1,
    };
    let rep = run_annulus_experiment(&AnnulusWorkload::Planted { n: 10_000, d: 10 }, &config).unwrap();
    let p = rep.params;
    Outcome {
        pass: rep.soundness_violations == 0 && rep.trials == 200 && rep.success_rate >= 0.02,
        detail: format!(
            "c=3 w=2 r=1 W={} k={} L={} ell={} m={} cap={}: success {}/{} = {:.3} (need >= 0.02), \
             soundness violations {}, mean candidates {:.1}",
            p.bucket_width,
            p.k,
            p.tables,
            p.ell,
            p.m,
            p.cap,
            rep.successes,
            rep.witnessed,
            rep.success_rate,
            rep.soundness_violations,
            rep.mean_candidates
        ),
        known_unattainable: false,
    }
}

fn criterion_8() -> Outcome {
    let width = 4.0;
    let trials = 100_000;
    let d = 10;
    let origin = Vector::dense(vec![0.0; d]).unwrap();
    let mut rng = RandomSeed(8).stream(0);
    let mut pass = true;
    let mut details = Vec::new();
    for s in [width / 2.0, width, 2.0 * width] {
        let mut hits = 0;
        for _ in 0..trials {
            let y = sample_unit_vector(d, &mut rng).scale(s);
            let atom = HashAtom::sample(d, width, &mut rng).unwrap();
            if atom.hash(&origin).unwrap() == atom.hash(&y).unwrap() {
                hits += 1;
            }
        }
        let p = collision_probability(s, width).unwrap();
        let rate = hits as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let z = (rate - p) / se;
        pass &= z.abs() <= 3.0;
        details.push(format!("s={s}: {rate:.4} vs {p:.4} (z={z:+.2})"));
    }
    Outcome { pass, detail: details.join("; "), known_unattainable: false }
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let mut timed = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        print_line(n, &outcome, elapsed);
        results.push((n, outcome, elapsed));
    };

    let mut csv1 = Vec::new();
    let mut csv5 = Vec::new();
    let mut csv6 = Vec::new();
    timed(1, &mut || {
        let (o, b) = criterion_1();
        csv1 = b;
        o
    });
    timed(2, &mut criterion_2);
    timed(3, &mut criterion_3);
    timed(4, &mut criterion_4);
    timed(5, &mut || {
        let (o, b) = criterion_5();
        csv5 = b;
        o
    });
    timed(6, &mut || {
        let (o, b) = criterion_6();
        csv6 = b;
        o
    });
    timed(7, &mut criterion_7);
    timed(8, &mut criterion_8);
    timed(9, &mut || {
        let same = [
            (1, criterion_1().1 == csv1),
            (5, criterion_5().1 == csv5),
            (6, criterion_6().1 == csv6),
        ];
        Outcome {
            pass: same.iter().all(|s| s.1),
            detail: same
                .iter()
                .map(|(n, ok)| format!("criterion {n} records byte-identical: {ok}"))
                .collect::<Vec<_>>()
                .join("; "),
            known_unattainable: false,
        }
    });

    let passed = results.iter().filter(|r| r.1.pass).count();
    let unexpected: Vec<usize> = results
        .iter()
        .filter(|r| !r.1.pass && !r.1.known_unattainable)
        .map(|r| r.0)
        .collect();
    let known: Vec<usize> = results
        .iter()
        .filter(|r| !r.1.pass && r.1.known_unattainable)
        .map(|r| r.0)
        .collect();
    println!(
        "acceptance: {passed}/{} PASS; known unattainable FAIL: {known:?}; unexpected FAIL: {unexpected:?}",
        results.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn print_line(n: usize, o: &Outcome, elapsed: Duration) {
    println!(
        "criterion {n}: {} [{:.1}s] {}",
        if o.pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        o.detail
    );
}
