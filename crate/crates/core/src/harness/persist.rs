use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::replicate::Summary;
use super::trajectory::{Sidecar, TrajectoryRecord};
use crate::diagnostics::Trajectory;
use crate::error::{Error, Result};

/// 17 significant digits; `NaN`, `inf` and `-inf` for non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn is_integer_column(name: &str) -> bool {
    name == "n" || name == "status"
}

pub fn write_trajectory_csv<W: Write>(out: W, table: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().zip(&table.columns).map(|(&v, c)| {
            if is_integer_column(c) && v.is_finite() {
                format!("{}", v as i64)
            } else {
                format_float(v)
            }
        }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let mut r = csv::Reader::from_path(path)?;
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let n_col = columns
        .iter()
        .position(|c| c == "n")
        .ok_or_else(|| Error::Config(format!("{}: no `n` column", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Dataset {
                path: path.to_path_buf(),
                row: i + 2,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    let grid = rows.iter().map(|r| r[n_col] as u64).collect();
    Ok(Trajectory { columns, grid, rows })
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

/// Reads a run config file. A trajectory sidecar is accepted too, in which
/// case its seed is returned alongside the config.
pub fn read_run_config(path: &Path) -> Result<(RunConfig, Option<u64>)> {
    let value: serde_json::Value = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
    let is_sidecar = value.get("config").is_some() && value.get("seed").is_some();
    let loaded = if is_sidecar {
        let side: Sidecar = serde_json::from_value(value)?;
        (side.config, Some(side.seed))
    } else {
        (serde_json::from_value(value)?, None)
    };
    Ok(loaded)
}

/// `{dir}/{prefix}_seed{seed}.csv` and `.json`.
pub fn trajectory_paths(dir: &Path, prefix: &str, seed: u64) -> (PathBuf, PathBuf) {
    let stem = format!("{prefix}_seed{seed}");
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes the CSV and its JSON sidecar; returns both paths.
pub fn write_record(dir: &Path, prefix: &str, record: &TrajectoryRecord) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let (csv_path, json_path) = trajectory_paths(dir, prefix, record.seed());
    write_trajectory_csv(BufWriter::new(File::create(&csv_path)?), &record.table)?;
    write_json(&json_path, &record.sidecar)?;
    Ok((csv_path, json_path))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_json(path, summary)
}
