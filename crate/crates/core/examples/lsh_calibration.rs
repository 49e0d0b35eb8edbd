//! Empirical collision rate of one quantized projection against the closed
//! form.

use afn::lsh::{collision_probability, HashAtom};
use afn::random::sample_unit_vector;
use afn::{RandomSeed, Vector};

fn main() -> afn::Result<()> {
    let width = 4.0;
    let trials = 200_000;
    let d = 8;
    let origin = Vector::dense(vec![0.0; d])?;
    let mut rng = RandomSeed(1).stream(0);
    for s in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let mut hits = 0;
        for _ in 0..trials {
            let atom = HashAtom::sample(d, width, &mut rng)?;
            let y = sample_unit_vector(d, &mut rng).scale(s);
            hits += usize::from(atom.hash(&origin)? == atom.hash(&y)?);
        }
        println!(
            "s={s:>5}: empirical {:.4}  closed form {:.4}",
            hits as f64 / trials as f64,
            collision_probability(s, width)?
        );
    }
    Ok(())
}
