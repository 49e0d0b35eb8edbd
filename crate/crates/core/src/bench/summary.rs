//! Per-cell distribution summaries of the achieved approximation factor.
//!
//! Quartiles use the nearest-rank method: the `p`-quantile of `N` sorted
//! values is the value at 1-based rank `ceil(p N)` (rank 1 for `p = 0`).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::experiment::ExperimentRecord;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variant: String,
    pub ell: usize,
    pub m: usize,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Nearest-rank quantile of already sorted values.
pub fn nearest_rank(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("quantile {p} outside [0, 1]")));
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).max(1);
    Ok(sorted[rank - 1])
}

fn summarize_values(variant: &str, ell: usize, m: usize, values: &mut [f64]) -> Result<SummaryRow> {
    values.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(SummaryRow {
        variant: variant.to_string(),
        ell,
        m,
        count: values.len(),
        min: values[0],
        q1: nearest_rank(values, 0.25)?,
        median: nearest_rank(values, 0.5)?,
        q3: nearest_rank(values, 0.75)?,
        max: values[values.len() - 1],
        mean,
    })
}

/// One row per `(variant, ell, m)` group, in order of first appearance.
pub fn summarize(records: &[ExperimentRecord]) -> Result<Vec<SummaryRow>> {
    let mut groups: Vec<((String, usize, usize), Vec<f64>)> = Vec::new();
    for rec in records {
        let key = (rec.variant.clone(), rec.ell, rec.m);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, values)) => values.push(rec.c_hat),
            None => groups.push((key, vec![rec.c_hat])),
        }
    }
    groups
        .iter_mut()
        .map(|((variant, ell, m), values)| summarize_values(variant, *ell, *m, values))
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(Error::RawIo)?;
    Ok(())
}

pub fn save_summary(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_summary(rows, std::io::BufWriter::new(file))
}
