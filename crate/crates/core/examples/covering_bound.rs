//! How many random directions the extremes ordering needs to guarantee an
//! approximation factor c for every query.

use afn::query_independent::ell_from_covering;
use afn::{suggested_ell, CoveringParams};

fn main() -> afn::Result<()> {
    println!("{:>4} {:>5} {:>14} {:>16}", "d", "c", "C_d(phi_c)", "ell");
    for d in [2, 5, 10, 20] {
        for c in [1.2, 1.5, 1.9] {
            let p = CoveringParams::new(c, d)?;
            let s = suggested_ell(&p, usize::MAX)?;
            println!("{d:>4} {c:>5} {:>14.4e} {:>16}", p.covering_number()?, s.ell);
        }
    }
    let capped = ell_from_covering(1e12, 1_000_000);
    println!("a cap of 10^6 directions gives ell={} (capped: {})", capped.ell, capped.capped);
    Ok(())
}
