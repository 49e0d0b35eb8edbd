//! Synthetic datasets and the on-disk vector formats.
//!
//! Two text formats are read and written:
//!
//! * ascii vectors: one dense vector per line, whitespace separated. An
//!   optional first line `n d` (two integers) is treated as a header when
//!   the remaining rows are exactly `n` rows of `d` values and either
//!   `n >= 2` or the file would otherwise be ragged.
//! * sparse vectors: a first line `sparse n d` followed by exactly `n` lines
//!   of `index:value` pairs (an empty line is the zero vector).
//!
//! MovieLens `ratings.csv` files are loaded as one sparse vector per movie
//! with one coordinate per user.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::random::{standard_normal, RandomSeed};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// i.i.d. Uniform[0, 1) coordinates.
    UniformCube,
    /// i.i.d. N(0, 1) coordinates.
    MultivariateNormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: Distribution,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

pub fn generate(spec: &GeneratorSpec) -> Result<VectorDataset> {
    if spec.n == 0 || spec.d == 0 {
        return Err(Error::param("generator needs n >= 1 and d >= 1"));
    }
    let mut rng = RandomSeed(spec.seed).stream(0);
    let points = (0..spec.n)
        .map(|_| {
            let coords = (0..spec.d)
                .map(|_| match spec.kind {
                    Distribution::UniformCube => rng.random::<f64>(),
                    Distribution::MultivariateNormal => standard_normal(&mut rng),
                })
                .collect();
            Vector::Dense(coords)
        })
        .collect();
    VectorDataset::new(points)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads either text format, dispatching on a leading `sparse` header.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<VectorDataset> {
    let path = path.as_ref();
    let mut first = String::new();
    open(path)?
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    if first.split_whitespace().next() == Some("sparse") {
        load_sparse_vectors(path)
    } else {
        load_vectors(path)
    }
}

/// Reads the ascii vectors format.
pub fn load_vectors(path: impl AsRef<Path>) -> Result<VectorDataset> {
    let path = path.as_ref();
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !tokens.is_empty() {
            rows.push((i + 1, tokens));
        }
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, "file contains no vectors"));
    }

    if let Some((n, d)) = header(&rows) {
        let data_rows = &rows[1..];
        let matches_header =
            data_rows.len() == n && data_rows.iter().all(|(_, t)| t.len() == d) && d >= 1;
        let ragged_as_data = rows.iter().any(|(_, t)| t.len() != rows[0].1.len());
        if matches_header && (n >= 2 || ragged_as_data) {
            rows.remove(0);
        }
    }

    let dim = rows[0].1.len();
    let mut points = Vec::with_capacity(rows.len());
    for (line, tokens) in &rows {
        if tokens.len() != dim {
            return Err(parse_error(
                path,
                *line,
                format!("expected {dim} values, found {}", tokens.len()),
            ));
        }
        let mut coords = Vec::with_capacity(dim);
        for (col, tok) in tokens.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| {
                parse_error(path, *line, format!("column {}: not a number: {tok:?}", col + 1))
            })?;
            if !v.is_finite() {
                return Err(parse_error(
                    path,
                    *line,
                    format!("column {}: non-finite value {tok:?}", col + 1),
                ));
            }
            coords.push(v);
        }
        points.push(Vector::Dense(coords));
    }
    VectorDataset::new(points)
}

fn header(rows: &[(usize, Vec<&str>)]) -> Option<(usize, usize)> {
    match rows[0].1.as_slice() {
        [n, d] => Some((n.parse().ok()?, d.parse().ok()?)),
        _ => None,
    }
}

/// Writes `data` in the ascii vectors format (with header) when it is dense,
/// in the sparse format otherwise. Values use Rust's shortest round-trip
/// formatting, so loading the file reproduces the dataset exactly.
pub fn save_dataset(data: &VectorDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_dataset(data, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_dataset<W: Write>(data: &VectorDataset, out: &mut W) -> std::io::Result<()> {
    if data.is_sparse() {
        writeln!(out, "sparse {} {}", data.len(), data.dim())?;
        for (_, p) in data.iter() {
            let entries: Vec<(usize, f64)> = match p {
                Vector::Sparse(s) => s.iter().collect(),
                Vector::Dense(c) => c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| (i, *v))
                    .collect(),
            };
            let line: Vec<String> = entries.iter().map(|(i, v)| format!("{i}:{v}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
    } else {
        writeln!(out, "{} {}", data.len(), data.dim())?;
        for (_, p) in data.iter() {
            let line: Vec<String> = p.to_dense().iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

/// Reads the sparse vectors format.
pub fn load_sparse_vectors(path: impl AsRef<Path>) -> Result<VectorDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (n, dim) = match lines.next().map(|(_, l)| l.split_whitespace().collect::<Vec<_>>()) {
        Some(h) if h.len() == 3 && h[0] == "sparse" => {
            let n: usize = h[1]
                .parse()
                .map_err(|_| parse_error(path, 1, "bad point count in header"))?;
            let d: usize = h[2]
                .parse()
                .map_err(|_| parse_error(path, 1, "bad dimension in header"))?;
            (n, d)
        }
        _ => return Err(parse_error(path, 1, "expected header `sparse <n> <d>`")),
    };
    let mut points = Vec::with_capacity(n);
    for (i, line) in lines {
        let lineno = i + 1;
        if points.len() == n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_error(path, lineno, format!("more than {n} vectors")));
        }
        let mut entries = Vec::new();
        for (col, tok) in line.split_whitespace().enumerate() {
            let (idx, val) = tok
                .split_once(':')
                .and_then(|(i, v)| Some((i.parse::<usize>().ok()?, v.parse::<f64>().ok()?)))
                .ok_or_else(|| {
                    parse_error(path, lineno, format!("column {}: expected index:value, got {tok:?}", col + 1))
                })?;
            entries.push((idx, val));
        }
        let v = Vector::sparse(dim, entries)
            .map_err(|e| parse_error(path, lineno, e.to_string()))?;
        points.push(v);
    }
    if points.len() != n {
        return Err(parse_error(
            path,
            text.lines().count(),
            format!("header promises {n} vectors, found {}", points.len()),
        ));
    }
    VectorDataset::new(points)
}

/// MovieLens ratings as sparse movie vectors.
#[derive(Clone, Debug)]
pub struct MovieLens {
    /// One point per movie; coordinate `u` is the rating by user `u`.
    pub dataset: VectorDataset,
    /// Original `movieId` for each point id.
    pub movie_ids: Vec<i64>,
    /// Original `userId` for each coordinate.
    pub user_ids: Vec<i64>,
    /// Number of repeated (user, movie) rows; the last rating was kept.
    pub duplicates: usize,
}

/// Reads a MovieLens `ratings.csv` (`userId,movieId,rating,timestamp`).
/// Users and movies are re-indexed densely in order of first appearance.
pub fn load_movielens(path: impl AsRef<Path>) -> Result<MovieLens> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(open(path)?);
    let headers = reader.headers()?.clone();
    let expected = ["userId", "movieId", "rating"];
    if headers.len() < 3 || headers.iter().take(3).ne(expected.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            "missing header userId,movieId,rating,timestamp",
        ));
    }

    let mut user_index: HashMap<i64, u32> = HashMap::new();
    let mut movie_index: HashMap<i64, u32> = HashMap::new();
    let mut user_ids = Vec::new();
    let mut movie_ids = Vec::new();
    let mut ratings: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
    let mut duplicates = 0;

    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| parse_error(path, line, e.to_string()))?;
        let field = |i: usize| record.get(i).map(str::trim).unwrap_or("");
        let user: i64 = field(0)
            .parse()
            .map_err(|_| parse_error(path, line, format!("row {}: bad userId {:?}", row + 1, field(0))))?;
        let movie: i64 = field(1)
            .parse()
            .map_err(|_| parse_error(path, line, format!("row {}: bad movieId {:?}", row + 1, field(1))))?;
        let rating: f64 = field(2)
            .parse()
            .ok()
            .filter(|r: &f64| r.is_finite())
            .ok_or_else(|| parse_error(path, line, format!("row {}: bad rating {:?}", row + 1, field(2))))?;

        let u = *user_index.entry(user).or_insert_with(|| {
            user_ids.push(user);
            (user_ids.len() - 1) as u32
        });
        let m = *movie_index.entry(movie).or_insert_with(|| {
            movie_ids.push(movie);
            ratings.push(Vec::new());
            (movie_ids.len() - 1) as u32
        });
        match seen.get(&(m, u)) {
            Some(&pos) => {
                duplicates += 1;
                ratings[m as usize][pos].1 = rating;
            }
            None => {
                seen.insert((m, u), ratings[m as usize].len());
                ratings[m as usize].push((u, rating));
            }
        }
    }
    if duplicates > 0 {
        log::warn!(
            "{}: {duplicates} repeated (user, movie) ratings, kept the last of each",
            path.display()
        );
    }
    if movie_ids.is_empty() {
        return Err(parse_error(path, 2, "no ratings"));
    }
    let dim = user_ids.len();
    let points = ratings
        .into_iter()
        .map(|r| Vector::sparse(dim, r.into_iter().map(|(u, v)| (u as usize, v))))
        .collect::<Result<Vec<_>>>()?;
    Ok(MovieLens {
        dataset: VectorDataset::new(points)?,
        movie_ids,
        user_ids,
        duplicates,
    })
}

/// Writes the `internal_id,original_movieId` mapping.
pub fn write_id_map(movie_ids: &[i64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["internal_id", "original_movieId"])?;
    for (i, id) in movie_ids.iter().enumerate() {
        w.write_record([i.to_string(), id.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
