use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::parallel::par_map;
use super::trajectory::{run_trajectory, TrajectoryRecord};
use crate::diagnostics::excursion_count;
use crate::error::Result;

/// Thresholds used for the excursion-frequency table.
pub const SUMMARY_DELTAS: [f64; 3] = [0.5, 0.9, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: u64,
    pub message: String,
    pub numeric: bool,
}

/// Per-`n` spread of one column across seeds. NaN cells are skipped; a cell
/// with no values left is `null` in JSON, and infinities are `"inf"`/`"-inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: u64,
    #[serde(with = "cells")]
    pub min: Vec<Option<f64>>,
    #[serde(with = "cells")]
    pub median: Vec<Option<f64>>,
    #[serde(with = "cells")]
    pub max: Vec<Option<f64>>,
}

mod cells {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Cell {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
        let cells: Vec<Option<Cell>> = v
            .iter()
            .map(|c| {
                c.map(|x| match x {
                    f64::INFINITY => Cell::Text("inf".into()),
                    f64::NEG_INFINITY => Cell::Text("-inf".into()),
                    x => Cell::Num(x),
                })
            })
            .collect();
        cells.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<f64>>, D::Error> {
        Vec::<Option<Cell>>::deserialize(d)?
            .into_iter()
            .map(|c| match c {
                None => Ok(None),
                Some(Cell::Num(x)) => Ok(Some(x)),
                Some(Cell::Text(t)) => match t.as_str() {
                    "inf" => Ok(Some(f64::INFINITY)),
                    "-inf" => Ok(Some(f64::NEG_INFINITY)),
                    _ => Err(D::Error::custom(format!("bad summary cell `{t}`"))),
                },
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionFrequency {
    pub statistic: String,
    pub delta: f64,
    /// Seeds with at least one grid point whose lower bracket exceeds `delta`.
    pub seeds_with_excursion: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub grid: Vec<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<SummaryRow>,
    pub excursions: Vec<ExcursionFrequency>,
    pub failures: Vec<SeedFailure>,
    /// Number of grid-point errors per seed, for seeds that completed.
    pub grid_errors: BTreeMap<u64, usize>,
}

#[derive(Debug, Clone)]
pub struct Replication {
    /// Completed trajectories, ordered by seed.
    pub records: Vec<TrajectoryRecord>,
    pub summary: Summary,
}

fn median(sorted: &[f64]) -> Option<f64> {
    let k = sorted.len();
    match k {
        0 => None,
        _ if k % 2 == 1 => Some(sorted[k / 2]),
        _ => Some(0.5 * (sorted[k / 2 - 1] + sorted[k / 2])),
    }
}

fn excursion_statistics(columns: &[String]) -> Vec<String> {
    columns
        .iter()
        .filter_map(|c| c.strip_suffix(".lower"))
        .filter(|c| !c.starts_with("mean_inverse_level"))
        .map(str::to_string)
        .collect()
}

/// Summarizes completed trajectories; the result does not depend on the
/// order of `records` or `failures`.
pub fn summarize(cfg: &RunConfig, records: &[TrajectoryRecord], failures: &[SeedFailure]) -> Result<Summary> {
    let mut records: Vec<&TrajectoryRecord> = records.iter().collect();
    records.sort_by_key(|r| r.seed());
    let mut failures = failures.to_vec();
    failures.sort_by_key(|f| f.seed);
    let mut seeds: Vec<u64> = cfg.seeds.clone();
    seeds.sort_unstable();

    let columns = super::trajectory::columns(cfg);
    let value_cols: Vec<usize> = (0..columns.len()).filter(|&j| columns[j] != "n").collect();
    let grid = super::config::evaluation_grid(cfg.n_max, cfg.grid_ratio)?;

    let mut rows = Vec::with_capacity(grid.len());
    for (i, &n) in grid.iter().enumerate() {
        let mut row = SummaryRow {
            n,
            min: Vec::new(),
            median: Vec::new(),
            max: Vec::new(),
        };
        for &j in &value_cols {
            let mut vals: Vec<f64> = records
                .iter()
                .filter_map(|r| r.table.rows.get(i).map(|row| row[j]))
                .filter(|v| !v.is_nan())
                .collect();
            vals.sort_by(f64::total_cmp);
            row.min.push(vals.first().copied());
            row.median.push(median(&vals));
            row.max.push(vals.last().copied());
        }
        rows.push(row);
    }

    let mut excursions = Vec::new();
    for stat in excursion_statistics(&columns) {
        for &delta in &SUMMARY_DELTAS {
            let mut hit = 0;
            for r in &records {
                if excursion_count(&r.table, &stat, delta)?.count > 0 {
                    hit += 1;
                }
            }
            excursions.push(ExcursionFrequency {
                statistic: stat.clone(),
                delta,
                seeds_with_excursion: hit,
                frequency: if records.is_empty() {
                    0.0
                } else {
                    hit as f64 / records.len() as f64
                },
            });
        }
    }

    Ok(Summary {
        config_hash: cfg.config_hash()?,
        seeds,
        grid,
        columns: value_cols.iter().map(|&j| columns[j].clone()).collect(),
        rows,
        excursions,
        failures,
        grid_errors: records.iter().map(|r| (r.seed(), r.sidecar.errors.len())).collect(),
    })
}

/// Runs every seed of `cfg` with up to `jobs` workers. Seeds that fail
/// outright are listed in the summary; the others are returned in seed order.
pub fn run_replications(cfg: &RunConfig, jobs: usize) -> Result<Replication> {
    cfg.validate()?;
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    let outcomes = par_map(&seeds, jobs, |&seed| (seed, run_trajectory(cfg, seed)));
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (seed, out) in outcomes {
        match out {
            Ok(r) => records.push(r),
            Err(e) => {
                log::error!("seed {seed}: {e}");
                failures.push(SeedFailure {
                    seed,
                    numeric: e.is_numeric(),
                    message: e.to_string(),
                });
            }
        }
    }
    let summary = summarize(cfg, &records, &failures)?;
    Ok(Replication { records, summary })
}
