use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::config::{evaluation_grid, ModelKind, RunConfig, TruthSpec};
use super::dataset::ingest_dataset;
use crate::barron::BarronEngine;
use crate::cosine::{CosineEngine, CosinePosterior};
use crate::density::{sample_gauss_exp, sample_step, GaussExpDensity, StepDensity};
use crate::diagnostics::{DiagnosticRequest, Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::{QuadratureOptions, RandomStream};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stream ids under a seed.
pub const DATA_STREAM: u64 = 0;
pub const AUX_STREAM: u64 = 1;

/// A failure recorded at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridError {
    pub n: u64,
    /// `None` when the whole row failed.
    pub column: Option<String>,
    pub message: String,
    pub numeric: bool,
}

/// Metadata stored next to a trajectory CSV; enough to replay the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub config: RunConfig,
    pub seed: u64,
    pub grid: Vec<u64>,
    pub columns: Vec<String>,
    pub version: String,
    pub config_hash: String,
    #[serde(default)]
    pub errors: Vec<GridError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub sidecar: Sidecar,
    pub table: Trajectory,
}

impl TrajectoryRecord {
    pub fn seed(&self) -> u64 {
        self.sidecar.seed
    }

    pub fn has_errors(&self) -> bool {
        !self.sidecar.errors.is_empty()
    }
}

/// The first `n` observations of the run's data stream.
pub fn generate_data(truth: &TruthSpec, seed: u64, n: u64) -> Result<Vec<f64>> {
    let mut rs = RandomStream::new(seed, DATA_STREAM);
    let n_us = n as usize;
    Ok(match truth {
        TruthSpec::Uniform => (0..n_us).map(|_| rs.next_open01()).collect(),
        TruthSpec::GaussExp { theta } => sample_gauss_exp(&GaussExpDensity::new(*theta)?, &mut rs, n_us),
        TruthSpec::Step { level, selected } => {
            sample_step(&StepDensity::new(*level, selected.iter().copied())?, &mut rs, n_us)
        }
        TruthSpec::File { path } => {
            let mut xs = ingest_dataset(path)?;
            if (xs.len() as u64) < n {
                return Err(Error::Config(format!(
                    "{} holds {} values but n_max is {n}",
                    path.display(),
                    xs.len()
                )));
            }
            xs.truncate(n_us);
            xs
        }
    })
}

/// `Σ ln f⋆(xᵢ)` from the engine's sufficient statistics.
fn truth_loglik(truth: &TruthSpec, n: u64, s_n: f64) -> f64 {
    match truth {
        TruthSpec::Uniform | TruthSpec::File { .. } => 0.0,
        TruthSpec::GaussExp { theta } => -(n as f64) * theta + (2.0 * theta).sqrt() * s_n,
        TruthSpec::Step { .. } => n as f64 * LN_2,
    }
}

pub fn columns(cfg: &RunConfig) -> Vec<String> {
    let mut cols: Vec<String> = match cfg.model {
        ModelKind::Barron => [
            "n",
            "w_n",
            "truth_loglik",
            "mass_f0.lower",
            "mass_f0.upper",
            "mass_fstep.lower",
            "mass_fstep.upper",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        ModelKind::Cosine => vec!["n".into(), "cap".into()],
    };
    for d in cfg.effective_diagnostics() {
        cols.extend(d.columns());
    }
    cols.push("status".into());
    cols
}

fn evaluate_cosine(d: &DiagnosticRequest, post: &CosinePosterior) -> Result<Vec<f64>> {
    let b = match *d {
        DiagnosticRequest::CosineHellingerMass { eps } => post.hellinger_mass(eps.get())?,
        DiagnosticRequest::CosineRegionMass { lo, hi } => post.region_mass(lo.get(), hi.get())?,
        _ => {
            return Err(Error::Config(format!(
                "{} applies to the Barron model only",
                d.base_name()
            )))
        }
    };
    Ok(vec![b.lower_value(), b.upper_value()])
}

struct RowBuilder<'a> {
    n: u64,
    row: Vec<f64>,
    errors: &'a mut Vec<GridError>,
}

impl RowBuilder<'_> {
    fn push_result(&mut self, column: &str, width: usize, r: Result<Vec<f64>>) {
        match r {
            Ok(v) => {
                debug_assert_eq!(v.len(), width);
                self.row.extend(v);
            }
            Err(e) => {
                self.row.extend(std::iter::repeat_n(f64::NAN, width));
                self.errors.push(GridError {
                    n: self.n,
                    column: Some(column.to_string()),
                    numeric: e.is_numeric(),
                    message: e.to_string(),
                });
            }
        }
    }

    fn fail_row(&mut self, total: usize, e: Error) {
        self.row.resize(total - 1, f64::NAN);
        self.errors.push(GridError {
            n: self.n,
            column: None,
            numeric: e.is_numeric(),
            message: e.to_string(),
        });
    }

    fn finish(mut self, total: usize, start_errors: usize) -> Vec<f64> {
        let failed = self.errors.len() > start_errors;
        self.row.resize(total - 1, f64::NAN);
        self.row.push(if failed { 1.0 } else { 0.0 });
        self.row
    }
}

/// Streams the data, updates the engine and evaluates the configured
/// diagnostics on the grid. Failures at a grid point are recorded in the
/// sidecar and the run continues; the affected cells hold NaN and the row's
/// `status` is 1.
pub fn run_trajectory(cfg: &RunConfig, seed: u64) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let grid = evaluation_grid(cfg.n_max, cfg.grid_ratio)?;
    let data = generate_data(&cfg.truth, seed, cfg.n_max)?;
    let cols = columns(cfg);
    let diags = cfg.effective_diagnostics();
    let mut errors = Vec::new();
    let mut rows = Vec::with_capacity(grid.len());
    let mut next = grid.iter().peekable();

    match cfg.model {
        ModelKind::Barron => {
            let mut engine = BarronEngine::new(cfg.barron_prior, cfg.truncation)?;
            engine.quadrature = QuadratureOptions {
                rel_tol: cfg.quadrature_rel_tol,
                ..QuadratureOptions::default()
            };
            for (i, &x) in data.iter().enumerate() {
                engine.observe(x)?;
                let n = i as u64 + 1;
                if next.peek() != Some(&&n) {
                    continue;
                }
                next.next();
                let start = errors.len();
                let ell = truth_loglik(&cfg.truth, n, engine.stats().s_n());
                let mut rb = RowBuilder {
                    n,
                    row: vec![n as f64, engine.stats().w_n(), ell],
                    errors: &mut errors,
                };
                match Snapshot::new(&engine, ell) {
                    Ok(snap) => {
                        let s = &snap.split;
                        rb.row.extend([
                            s.mass_f0.lower_value(),
                            s.mass_f0.upper_value(),
                            s.mass_fstep.lower_value(),
                            s.mass_fstep.upper_value(),
                        ]);
                        for d in &diags {
                            rb.push_result(&d.stem(), d.columns().len(), d.evaluate_barron(&snap));
                        }
                    }
                    Err(e) => rb.fail_row(cols.len(), e),
                }
                rows.push(rb.finish(cols.len(), start));
            }
        }
        ModelKind::Cosine => {
            let mut engine = CosineEngine::new(cfg.cosine_prior)?;
            for (i, &x) in data.iter().enumerate() {
                engine.observe(x)?;
                let n = i as u64 + 1;
                if next.peek() != Some(&&n) {
                    continue;
                }
                next.next();
                let start = errors.len();
                let mut rb = RowBuilder {
                    n,
                    row: vec![n as f64],
                    errors: &mut errors,
                };
                match engine.posterior() {
                    Ok(post) => {
                        rb.row.push(post.cap());
                        for d in &diags {
                            rb.push_result(&d.stem(), d.columns().len(), evaluate_cosine(d, &post));
                        }
                    }
                    Err(e) => rb.fail_row(cols.len(), e),
                }
                rows.push(rb.finish(cols.len(), start));
            }
        }
    }

    for e in &errors {
        log::warn!(
            "seed {seed}, n = {}: {}{}",
            e.n,
            e.column.as_deref().map(|c| format!("{c}: ")).unwrap_or_default(),
            e.message
        );
    }
    let normalized = cfg.normalized();
    Ok(TrajectoryRecord {
        sidecar: Sidecar {
            config_hash: normalized.config_hash()?,
            config: normalized,
            seed,
            grid: grid.clone(),
            columns: cols.clone(),
            version: VERSION.to_string(),
            errors,
        },
        table: Trajectory {
            columns: cols,
            grid,
            rows,
        },
    })
}
