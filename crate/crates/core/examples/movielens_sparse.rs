//! Load a MovieLens ratings file as sparse movie vectors and find the movie
//! whose rating vector is furthest from a given one.
//!
//! Usage: `cargo run --example movielens_sparse [path/to/ratings.csv]`.
//! Without an argument a tiny built-in sample is used.

use std::sync::Arc;

use afn::bench::brute_furthest;
use afn::datasets::load_movielens;
use afn::{AfnParams, ProjectionIndex, RandomSeed};

const SAMPLE: &str = "userId,movieId,rating,timestamp
1,1,4.0,964982703
1,3,4.0,964981247
1,6,4.0,964982224
2,1,3.5,1445714835
2,6,1.0,1445714885
3,3,0.5,1306463578
3,6,5.0,1306464142
3,47,4.5,1306463807
4,1,5.0,986935199
4,47,2.0,986934914
";

fn main() -> afn::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let p = std::env::temp_dir().join("afn-sample-ratings.csv");
            std::fs::write(&p, SAMPLE).map_err(afn::Error::RawIo)?;
            p
        }
    };
    let ml = load_movielens(&path)?;
    println!(
        "{} movies x {} users, {} repeated ratings",
        ml.movie_ids.len(),
        ml.user_ids.len(),
        ml.duplicates
    );

    let data = Arc::new(ml.dataset);
    let n = data.len();
    let index = ProjectionIndex::build(Arc::clone(&data), AfnParams::new(2.0, 4, n.min(50))?, RandomSeed(1))?;
    let q = data.point(0);
    let got = index.query(q)?;
    let (best, max) = brute_furthest(&data, q)?;
    println!(
        "furthest from movie {}: index says {} ({:.3}), brute force says {} ({:.3})",
        ml.movie_ids[0], ml.movie_ids[got.point_id], got.distance, ml.movie_ids[best], max
    );
    Ok(())
}
