//! The three query-independent orderings, scanned prefix-first.

use std::sync::Arc;

use afn::bench::brute_furthest;
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::{OrderStrategy, QueryIndependentOrder, RandomSeed};

fn main() -> afn::Result<()> {
    let data = Arc::new(generate(&GeneratorSpec {
        kind: Distribution::MultivariateNormal,
        n: 10_000,
        d: 10,
        seed: 5,
    })?);
    let q = data.point(123);
    let (_, max) = brute_furthest(&data, q)?;

    for strategy in [OrderStrategy::Extremes, OrderStrategy::MaxProjection, OrderStrategy::MinDepth] {
        let order = QueryIndependentOrder::build(strategy, Arc::clone(&data), 20, RandomSeed(9))?;
        // One scan, extended step by step.
        let mut scan = order.scan(q)?;
        let factors: Vec<String> = [1, 5, 20, 80]
            .iter()
            .map(|&m| scan.advance_to(m).map(|r| format!("m={m}: {:.4}", max / r.distance)))
            .collect::<afn::Result<_>>()?;
        println!("{:<15} ({} ranked) {}", strategy.name(), order.len(), factors.join("  "));
    }
    Ok(())
}
