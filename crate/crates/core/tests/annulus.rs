use std::collections::BTreeSet;
use std::sync::Arc;

use afn::annulus::StopReason;
use afn::bench::{brute_annulus, plant_annulus_instance};
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::{derive_params, AnnulusIndex, AnnulusParams, Error, RandomSeed, Vector, VectorDataset};

fn normal(n: usize, d: usize, seed: u64) -> Arc<VectorDataset> {
    Arc::new(
        generate(&GeneratorSpec {
            kind: Distribution::MultivariateNormal,
            n,
            d,
            seed,
        })
        .unwrap(),
    )
}

fn small_params() -> AnnulusParams {
    AnnulusParams::new(1.0, 2.0, 2.0, 3.0, 2, 4, 3, 10).unwrap()
}

#[test]
fn bucket_membership_matches_recomputed_hashes() {
    let data = normal(400, 4, 1);
    let idx = AnnulusIndex::build(Arc::clone(&data), small_params(), RandomSeed(2)).unwrap();
    for (g, table) in idx.hashes().iter().zip(idx.tables()) {
        let mut seen = 0;
        for (key, bucket) in table {
            let members: BTreeSet<usize> = bucket.lists()[0].iter().map(|e| e.point_id()).collect();
            for list in bucket.lists() {
                assert_eq!(list.len(), members.len());
                assert!(list.windows(2).all(|w| w[0].value >= w[1].value));
                let ids: BTreeSet<usize> = list.iter().map(|e| e.point_id()).collect();
                assert_eq!(ids, members);
            }
            for (i, a) in idx.projections().iter().enumerate() {
                for e in &bucket.lists()[i] {
                    assert!((e.value - a.dot(data.point(e.point_id())).unwrap()).abs() < 1e-9);
                }
            }
            for &id in &members {
                assert_eq!(&g.hash_point(data.point(id)).unwrap(), key);
            }
            seen += members.len();
        }
        assert_eq!(seen, data.len());
    }
}

#[test]
fn returned_points_are_sound_and_cap_is_respected() {
    let data = normal(600, 3, 5);
    let params = small_params();
    let idx = AnnulusIndex::build(Arc::clone(&data), params, RandomSeed(6)).unwrap();
    for qid in 0..100 {
        let q = data.point(qid).scale(1.3);
        let (outcome, trace) = idx.query_trace(&q).unwrap();
        assert!(outcome.candidates_examined <= params.cap);
        assert_eq!(outcome.candidates_examined, trace.len());
        assert!(trace.windows(2).all(|w| w[0].priority >= w[1].priority));
        match outcome.hit {
            Some((id, dist)) => {
                assert_eq!(outcome.stop, StopReason::Found);
                let recomputed = data.point(id).l2_distance(&q).unwrap();
                assert!((dist - recomputed).abs() < 1e-12);
                assert!(params.accepts(recomputed));
                assert_eq!(trace.last().unwrap().point_id, id);
                // Nothing accepted before the returned point.
                assert!(trace[..trace.len() - 1].iter().all(|s| !params.accepts(s.distance)));
            }
            None => assert!(trace.iter().all(|s| !params.accepts(s.distance))),
        }
    }
}

#[test]
fn repeated_candidates_are_counted_each_time() {
    // Three points near q, nothing in the annulus: every list of every
    // matched bucket is drained and each copy costs one evaluation.
    let data = Arc::new(
        VectorDataset::from_rows([vec![0.01, 0.0], vec![0.0, 0.01], vec![-0.01, 0.0]]).unwrap(),
    );
    let params = AnnulusParams::new(1.0, 2.0, 2.0, 1000.0, 1, 3, 2, 20).unwrap();
    let idx = AnnulusIndex::build(data, params, RandomSeed(1)).unwrap();
    let q = Vector::dense(vec![0.0, 0.0]).unwrap();
    let (outcome, trace) = idx.query_trace(&q).unwrap();
    assert_eq!(outcome.hit, None);
    assert_eq!(outcome.stop, StopReason::QueueExhausted);
    assert_eq!(outcome.candidates_examined, 3 * 2 * 3);
    for id in 0..3 {
        assert_eq!(trace.iter().filter(|s| s.point_id == id).count(), 6);
    }

    let capped = idx.query_with_cap(&q, 4).unwrap();
    assert_eq!(capped.stop, StopReason::CapReached);
    assert_eq!(capped.candidates_examined, 4);
    assert!(idx.query_with_cap(&q, 0).is_err());
}

#[test]
fn planted_witness_is_found() {
    let (r, w, c) = (1.0, 2.0, 3.0);
    let mut found = 0;
    for t in 0..10 {
        let inst = plant_annulus_instance(1000, 6, r, w, c, RandomSeed(t)).unwrap();
        let (params, _) = derive_params(1000, r, w, c, None).unwrap();
        let idx = AnnulusIndex::build(Arc::clone(&inst.data), params, RandomSeed(100 + t)).unwrap();
        assert_eq!(brute_annulus(&inst.data, &inst.query, r, w).unwrap(), Some(inst.witness));
        let out = idx.query(&inst.query).unwrap();
        if let Some((id, _)) = out.hit {
            assert_eq!(id, inst.witness);
            found += 1;
        }
    }
    assert!(found >= 2, "found {found}");
}

#[test]
fn deterministic_build_and_round_trip() {
    let data = normal(300, 4, 8);
    let a = AnnulusIndex::build(Arc::clone(&data), small_params(), RandomSeed(3)).unwrap();
    let b = AnnulusIndex::build(Arc::clone(&data), small_params(), RandomSeed(3)).unwrap();
    assert_eq!(a.tables(), b.tables());
    assert_eq!(a.hashes(), b.hashes());

    let mut buf = Vec::new();
    a.save(&mut buf).unwrap();
    let loaded = AnnulusIndex::load(buf.as_slice(), Arc::clone(&data)).unwrap();
    assert_eq!(loaded.params(), a.params());
    assert_eq!(loaded.tables(), a.tables());
    for (_, q) in data.iter().take(30) {
        assert_eq!(loaded.query(q).unwrap(), a.query(q).unwrap());
    }
    assert!(AnnulusIndex::load(buf.as_slice(), normal(10, 4, 8)).is_err());
}

#[test]
fn derived_parameters_and_budget() {
    let (p, s) = derive_params(10_000, 1.0, 2.0, 3.0, None).unwrap();
    assert_eq!(p.bucket_width, 8.0);
    assert_eq!((p.k, p.tables, p.ell, p.m, p.cap), (13, 19, 15, 112, 169));
    assert!(s.rho < 1.0);
    assert_eq!(p.inner_radius(), 1.0 / 6.0);
    assert_eq!(p.outer_radius(), 6.0);

    let data = normal(100, 2, 1);
    let err = AnnulusIndex::build_with_budget(data, small_params(), RandomSeed(0), 100).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { required: 1200, budget: 100 }));
}
