use std::collections::HashSet;
use std::sync::Arc;

use afn::bench::brute_furthest;
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::{AfnParams, ProjectionIndex, RandomSeed, Vector, VectorDataset};
use proptest::prelude::*;

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

fn build(data: &Arc<VectorDataset>, ell: usize, m: usize, seed: u64) -> ProjectionIndex {
    ProjectionIndex::build(Arc::clone(data), AfnParams::new(2.0, ell, m).unwrap(), RandomSeed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lists_hold_the_top_m(n in 1usize..60, d in 1usize..6, ell in 1usize..6, m in 1usize..70, seed in any::<u64>()) {
        let data = normal(n, d, seed);
        let idx = build(&data, ell, m, seed ^ 1);
        for (a, list) in idx.projections().iter().zip(idx.lists()) {
            prop_assert_eq!(list.len(), m.min(n));
            prop_assert!(list.windows(2).all(|w| w[0].value >= w[1].value));
            for e in list {
                let recomputed = a.dot(data.point(e.point_id())).unwrap();
                prop_assert!((e.value - recomputed).abs() <= 1e-9);
            }
            // Exactly the m largest projections, ties toward the smaller id.
            let mut all: Vec<(f64, usize)> = data.iter().map(|(id, x)| (a.dot(x).unwrap(), id)).collect();
            all.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            let expected: Vec<usize> = all.iter().take(m.min(n)).map(|p| p.1).collect();
            let got: Vec<usize> = list.iter().map(|e| e.point_id()).collect();
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn query_loop_invariants(n in 2usize..80, d in 1usize..6, ell in 1usize..8, m in 1usize..40, seed in any::<u64>()) {
        let data = normal(n, d, seed);
        let idx = build(&data, ell, m, seed ^ 2);
        let members: HashSet<usize> = idx.lists().iter().flatten().map(|e| e.point_id()).collect();
        let q = data.point((seed % n as u64) as usize).scale(0.5);
        let trace = idx.query_trace(&q).unwrap();
        let r = trace.result;
        prop_assert!(r.candidates_examined <= m);
        prop_assert_eq!(r.candidates_examined, trace.dequeued.len());
        prop_assert!(trace.dequeued.windows(2).all(|w| w[0].key >= w[1].key));
        prop_assert!(members.contains(&r.point_id));
        prop_assert!((r.distance - data.point(r.point_id).l2_distance(&q).unwrap()).abs() <= 1e-9);
        let best = trace.dequeued.iter().map(|s| s.distance).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(best, r.distance);
        // Fewer than m stored entries: the queue empties first.
        prop_assert_eq!(r.candidates_examined, m.min(ell * m.min(n)));
        prop_assert_eq!(idx.query(&q).unwrap(), r);
    }

    #[test]
    fn saturated_distinct_query_is_exact(n in 2usize..120, d in 1usize..10, ell in 1usize..9, seed in any::<u64>()) {
        let data = normal(n, d, seed);
        let idx = build(&data, ell, n, seed ^ 3);
        for qid in 0..n.min(10) {
            let q = data.point(qid);
            let r = idx.query_distinct(q).unwrap();
            prop_assert_eq!(r.candidates_examined, n);
            prop_assert_eq!(r.point_id, brute_furthest(&data, q).unwrap().0);
        }
    }
}

#[test]
fn single_projection_at_saturation_matches_brute_force() {
    // With one list of all n points, n dequeues visit every point once.
    let data = normal(50, 5, 17);
    let idx = build(&data, 1, 50, 4);
    for (_, q) in data.iter() {
        assert_eq!(idx.query(q).unwrap().point_id, brute_furthest(&data, q).unwrap().0);
    }
}

#[test]
fn rebuild_is_deterministic() {
    let data = normal(300, 8, 3);
    let a = build(&data, 7, 20, 99);
    let b = build(&data, 7, 20, 99);
    assert_eq!(a.projections(), b.projections());
    assert_eq!(a.lists(), b.lists());
    let c = build(&data, 7, 20, 100);
    assert_ne!(a.projections(), c.projections());
}

#[test]
fn radius_at_true_distance() {
    let data = normal(200, 6, 8);
    let idx = build(&data, 1, 200, 2);
    for qid in [0usize, 17, 150] {
        let q = data.point(qid);
        let (_, r) = brute_furthest(&data, q).unwrap();
        let res = idx.query_with_radius(q, r, 1.01).unwrap();
        assert!(res.distance >= r / 1.01);
    }
}

#[test]
fn unreachable_radius_is_a_full_query() {
    let data = normal(200, 6, 9);
    let idx = build(&data, 5, 30, 2);
    let q = data.point(3);
    let (_, max) = brute_furthest(&data, q).unwrap();
    assert_eq!(idx.query_with_radius(q, 3.0 * max, 2.0).unwrap(), idx.query(q).unwrap());
}

#[test]
fn early_termination_at_planted_point() {
    let mut rows: Vec<Vec<f64>> = (0..99)
        .map(|i| {
            let t = i as f64 * 0.37;
            vec![t.sin() * 0.9, t.cos() * 0.9, (t * 1.3).sin() * 0.3]
        })
        .collect();
    rows.push(vec![60.0, 80.0, 0.0]);
    let data = Arc::new(VectorDataset::from_rows(rows).unwrap());
    let idx = build(&data, 6, 100, 5);
    let q = Vector::dense(vec![0.0, 0.0, 0.0]).unwrap();
    let trace = idx.query_trace(&q).unwrap();
    let first = trace.dequeued.iter().position(|s| s.point_id == 99).unwrap() + 1;
    let res = idx.query_with_radius(&q, 100.0, 2.0).unwrap();
    assert_eq!(res.point_id, 99);
    assert!(res.candidates_examined <= first);
}

#[test]
fn save_load_round_trip() {
    let data = normal(120, 4, 21);
    let idx = build(&data, 5, 12, 6);
    let mut buf = Vec::new();
    idx.save(&mut buf).unwrap();
    let loaded = ProjectionIndex::load(buf.as_slice(), Arc::clone(&data)).unwrap();
    assert_eq!(loaded.params(), idx.params());
    assert_eq!(loaded.seed(), idx.seed());
    assert_eq!(loaded.projections(), idx.projections());
    assert_eq!(loaded.lists(), idx.lists());
    for (_, q) in data.iter().take(20) {
        assert_eq!(loaded.query(q).unwrap(), idx.query(q).unwrap());
    }

    let other = normal(50, 4, 21);
    assert!(ProjectionIndex::load(buf.as_slice(), other).is_err());
    assert!(ProjectionIndex::load(&b"{\"format\":\"nope\"}"[..], data).is_err());
}
