//! Projection tail rates for a far and a near point against their bounds.

use afn::bench::lemma3_montecarlo;
use afn::RandomSeed;

fn main() -> afn::Result<()> {
    let c = 2f64.sqrt();
    for n in [1_000, 10_000, 100_000, 1_000_000] {
        let r = lemma3_montecarlo(n, c, 1_000_000, RandomSeed(n as u64))?;
        println!(
            "n={n:>8} t={:.4}  far {:.5} (bound {:.5})  near {:.2e} (exact {:.2e}, bound {:.2e})",
            r.t, r.far_rate, r.far_bound, r.near_rate, r.near_exact, r.near_bound
        );
    }
    Ok(())
}
