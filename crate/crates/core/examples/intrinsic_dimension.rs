//! Intrinsic dimensionality mu^2 / (2 sigma^2) of synthetic data.

use afn::bench::rho_statistic;
use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::RandomSeed;

fn main() -> afn::Result<()> {
    for d in [2, 10, 30, 100] {
        let mut row = format!("d={d:>3}");
        for (name, kind) in [("uniform", Distribution::UniformCube), ("normal", Distribution::MultivariateNormal)] {
            let data = generate(&GeneratorSpec { kind, n: 10_000, d, seed: 2 })?;
            row += &format!("  {name}: {:.3}", rho_statistic(&data, 100_000, RandomSeed(3))?);
        }
        println!("{row}");
    }
    Ok(())
}
