//! Median approximation factor over a small (ell, m) grid for every variant.

use std::sync::Arc;

use afn::bench::{run_experiment, ExperimentConfig, Variant};
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::RandomSeed;

fn main() -> afn::Result<()> {
    let data = Arc::new(generate(&GeneratorSpec {
        kind: Distribution::MultivariateNormal,
        n: 10_000,
        d: 10,
        seed: 1,
    })?);
    for variant in Variant::ALL {
        let config = ExperimentConfig {
            dataset_id: "normal".into(),
            variant,
            cells: [1, 5, 10, 20, 30].iter().map(|&g| (g, g)).collect(),
            seeds: 10,
            queries_per_seed: 10,
            master_seed: RandomSeed(2024),
            c: 2.0,
            record_wall_time: true,
        };
        let out = run_experiment(&data, &config)?;
        let medians: Vec<String> = out
            .summary
            .iter()
            .map(|row| format!("{}:{:.3}", row.ell, row.median))
            .collect();
        println!("{:<12} {}", variant.name(), medians.join("  "));
    }
    Ok(())
}
