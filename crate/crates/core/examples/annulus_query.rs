//! Plant one point in a distance band around a query and find it with the
//! annulus index.

use afn::annulus::{derive_params, AnnulusIndex};
use afn::bench::plant_annulus_instance;
use afn::RandomSeed;

fn main() -> afn::Result<()> {
    let (n, d, r, w, c) = (5_000, 10, 1.0, 2.0, 3.0);
    let inst = plant_annulus_instance(n, d, r, w, c, RandomSeed(11))?;
    let (params, sens) = derive_params(n, r, w, c, None)?;
    println!(
        "W={} p1={:.4} p2={:.4} rho={:.4} -> k={} L={} ell={} m={} cap={}",
        params.bucket_width, sens.p1, sens.p2, sens.rho, params.k, params.tables, params.ell, params.m, params.cap
    );
    println!("accepting distances in [{:.4}, {:.4}]", params.inner_radius(), params.outer_radius());

    let index = AnnulusIndex::build(inst.data.clone(), params, RandomSeed(12))?;
    let (outcome, trace) = index.query_trace(&inst.query)?;
    for step in trace.iter().take(5) {
        println!(
            "  table {} list {} point {} priority {:.3} distance {:.3}",
            step.table, step.list, step.point_id, step.priority, step.distance
        );
    }
    println!(
        "witness {}, returned {:?} after {} candidates ({:?})",
        inst.witness,
        outcome.point_id(),
        outcome.candidates_examined,
        outcome.stop
    );
    Ok(())
}
