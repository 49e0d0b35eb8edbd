//! Save an index to disk, load it back against the same dataset and check
//! that it answers identically.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::sync::Arc;

use afn::datasets::{generate, load_dataset, save_dataset, Distribution, GeneratorSpec};
use afn::{AfnParams, Error, ProjectionIndex, RandomSeed};

fn main() -> afn::Result<()> {
    let dir = std::env::temp_dir().join("afn-persistence-example");
    std::fs::create_dir_all(&dir).map_err(Error::RawIo)?;
    let data_path = dir.join("vectors.txt");
    let index_path = dir.join("index.json");

    let data = generate(&GeneratorSpec {
        kind: Distribution::UniformCube,
        n: 1_000,
        d: 16,
        seed: 8,
    })?;
    save_dataset(&data, &data_path)?;

    let data = Arc::new(data);
    let index = ProjectionIndex::build(Arc::clone(&data), AfnParams::new(1.5, 12, 40)?, RandomSeed(4))?;
    index.save(BufWriter::new(File::create(&index_path).map_err(Error::RawIo)?))?;

    let reloaded_data = Arc::new(load_dataset(&data_path)?);
    let reloaded = ProjectionIndex::load(
        BufReader::new(File::open(&index_path).map_err(Error::RawIo)?),
        Arc::clone(&reloaded_data),
    )?;
    let agree = (0..reloaded_data.len())
        .map(|i| Ok(index.query(data.point(i))? == reloaded.query(reloaded_data.point(i))?))
        .collect::<afn::Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&same| same)
        .count();
    println!("wrote {} and {}", data_path.display(), index_path.display());
    println!("{agree}/{} queries identical after reload", reloaded_data.len());
    Ok(())
}
