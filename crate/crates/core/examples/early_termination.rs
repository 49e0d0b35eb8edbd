//! When the furthest distance is known in advance, the query can stop at the
//! first candidate that is already good enough.

use std::sync::Arc;

use afn::datasets::{generate, Distribution, GeneratorSpec};
use afn::{AfnParams, ProjectionIndex, RandomSeed, Vector, VectorDataset};

fn main() -> afn::Result<()> {
    let cloud = generate(&GeneratorSpec {
        kind: Distribution::UniformCube,
        n: 2_000,
        d: 3,
        seed: 1,
    })?;
    let mut points = cloud.points().to_vec();
    points.push(Vector::dense(vec![60.0, 80.0, 0.0])?);
    let data = Arc::new(VectorDataset::new(points)?);

    let index = ProjectionIndex::build(Arc::clone(&data), AfnParams::new(2.0, 8, 200)?, RandomSeed(3))?;
    let q = Vector::dense(vec![0.5, 0.5, 0.5])?;

    let full = index.query(&q)?;
    let early = index.query_with_radius(&q, 100.0, 2.0)?;
    println!("full query:  point {} at {:.2}, {} candidates", full.point_id, full.distance, full.candidates_examined);
    println!("radius 100:  point {} at {:.2}, {} candidates", early.point_id, early.distance, early.candidates_examined);
    Ok(())
}
