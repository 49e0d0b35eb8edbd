//! Build a query-dependent index with the default parameters and compare its
//! answers with brute force.

use std::sync::Arc;

use afn::bench::brute_furthest;
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::{default_params, ProjectionIndex, RandomSeed};

fn main() -> afn::Result<()> {
    let n = 5_000;
    let c = 1.5;
    let data = Arc::new(generate(&GeneratorSpec {
        kind: Distribution::MultivariateNormal,
        n,
        d: 10,
        seed: 42,
    })?);

    let params = default_params(n, c)?;
    println!("n={n} c={c}: ell={} m={}", params.ell, params.m);
    let index = ProjectionIndex::build(Arc::clone(&data), params, RandomSeed(7))?;

    let mut within = 0;
    for qid in (0..n).step_by(250) {
        let q = data.point(qid);
        let got = index.query(q)?;
        let (best, max) = brute_furthest(&data, q)?;
        let ratio = max / got.distance;
        if ratio <= c {
            within += 1;
        }
        println!(
            "query {qid:>4}: returned {:>4} at {:.3}, furthest {best:>4} at {max:.3}, factor {ratio:.4}, {} candidates",
            got.point_id, got.distance, got.candidates_examined
        );
    }
    println!("{within}/20 answers within factor {c}");
    Ok(())
}
