use std::path::{Path, PathBuf};

use log::info;
use posterior_lab::cosine::CosinePrior;
use posterior_lab::diagnostics::{excursion_count, DiagnosticRequest, Param};
use posterior_lab::harness::{
    read_run_config, run_replications, run_trajectory, trajectory_paths, write_record, write_summary, ModelKind,
    Replication, RunConfig, TruthSpec,
};

use crate::{CliError, ReplicateArgs, RunArgs, ScanArgs, TrajArgs};

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Config file first, then flags on top. Returns the sidecar seed if the
/// file was a sidecar.
pub fn build_config(args: &RunArgs) -> Result<(RunConfig, Option<u64>)> {
    let (mut cfg, seed) = match &args.config {
        Some(path) => read_run_config(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => {
            let truth = args
                .truth
                .as_deref()
                .ok_or_else(|| usage("--truth is required without --config"))?;
            let n_max = args
                .n_max
                .ok_or_else(|| usage("--n-max is required without --config"))?;
            (RunConfig::new(truth.parse()?, ModelKind::default(), n_max), None)
        }
    };
    if let Some(m) = &args.model {
        cfg.model = m.parse()?;
    }
    if let Some(t) = &args.truth {
        cfg.truth = t.parse::<TruthSpec>()?;
    }
    if let Some(n) = args.n_max {
        cfg.n_max = n;
    }
    if let Some(r) = args.grid_ratio {
        cfg.grid_ratio = r;
    }
    if let Some(t) = args.rel_tol {
        cfg.quadrature_rel_tol = t;
    }
    if let Some(w) = args.f0_weight {
        cfg.barron_prior.continuous_weight = w;
    }
    if let Some(m) = args.truncation {
        cfg.truncation.fixed = Some(m);
    }
    if let Some(p) = &args.cosine_prior {
        cfg.cosine_prior.prior = p.parse::<CosinePrior>()?;
    }
    if let Some(c) = args.cosine_max_cap {
        cfg.cosine_prior.max_cap = c;
    }
    if !args.diagnostics.is_empty() {
        cfg.diagnostics = args
            .diagnostics
            .iter()
            .map(|d| d.parse::<DiagnosticRequest>())
            .collect::<posterior_lab::Result<_>>()?;
    }
    Ok((cfg, seed))
}

/// `1..20`, `3,5,8` or a mix such as `1..4,9`; ranges are inclusive.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || usage(format!("cannot parse seeds `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

/// `a:b:step` inclusive of `b`, or a single value. `ln2` is accepted.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || usage(format!("cannot parse grid `{s}` (expected a:b:step or a value)"));
    let num = |t: &str| t.parse::<Param>().map(Param::get).map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [v] => Ok(vec![num(v)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut k = 0.0;
            loop {
                // rounding keeps stems like 0.30000000000000004 out of column names
                let v = ((a + k * step) * 1e12).round() / 1e12;
                if v > b + 1e-9 * step {
                    break;
                }
                out.push(v);
                k += 1.0;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

fn numeric_grid_errors(rep: &Replication) -> usize {
    rep.records
        .iter()
        .map(|r| r.sidecar.errors.iter().filter(|e| e.numeric).count())
        .sum()
}

/// Maps seed failures and numeric grid errors to an exit status.
fn failures_to_result(rep: &Replication) -> Result<()> {
    let f = &rep.summary.failures;
    if let Some(first) = f.iter().find(|f| f.numeric) {
        return Err(CliError::Numeric(format!(
            "{} seed(s) failed; seed {}: {}",
            f.len(),
            first.seed,
            first.message
        )));
    }
    if let Some(first) = f.first() {
        return Err(usage(format!(
            "{} seed(s) failed; seed {}: {}",
            f.len(),
            first.seed,
            first.message
        )));
    }
    match numeric_grid_errors(rep) {
        0 => Ok(()),
        k => Err(CliError::Numeric(format!("{k} grid point(s) failed; see the sidecars"))),
    }
}

fn check_jobs(jobs: usize) -> Result<()> {
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    Ok(())
}

pub fn traj(a: TrajArgs) -> Result<()> {
    let (mut cfg, side_seed) = build_config(&a.run)?;
    let seed = a.seed.or(side_seed).unwrap_or(cfg.seeds[0]);
    cfg.seeds = vec![seed];
    cfg.validate()?;
    let record = run_trajectory(&cfg, seed)?;
    let (csv, json) = write_record(&a.out, &a.prefix, &record)?;
    info!("wrote {} and {}", csv.display(), json.display());
    match record.sidecar.errors.iter().filter(|e| e.numeric).count() {
        0 => Ok(()),
        k => Err(CliError::Numeric(format!(
            "{k} grid point(s) failed; see {}",
            json.display()
        ))),
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    Ok(std::path::absolute(p)?)
}

pub fn replicate(a: ReplicateArgs) -> Result<()> {
    check_jobs(a.jobs)?;
    let (mut cfg, _) = build_config(&a.run)?;
    if let Some(s) = &a.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    cfg.validate()?;
    let summary = a.summary.clone().unwrap_or_else(|| a.out.join("summary.json"));
    let summary_abs = absolute(&summary)?;
    for &seed in &cfg.seeds {
        let (c, j) = trajectory_paths(&a.out, &a.prefix, seed);
        if absolute(&c)? == summary_abs || absolute(&j)? == summary_abs {
            return Err(usage(format!(
                "summary path {} overlaps a trajectory file",
                summary.display()
            )));
        }
    }
    let rep = run_replications(&cfg, a.jobs)?;
    for r in &rep.records {
        write_record(&a.out, &a.prefix, r)?;
    }
    write_summary(&summary, &rep.summary)?;
    info!("{} trajectories and {} written", rep.records.len(), summary.display());
    failures_to_result(&rep)
}

pub fn scan(a: ScanArgs) -> Result<()> {
    check_jobs(a.jobs)?;
    let (mut cfg, _) = build_config(&a.run)?;
    if cfg.model != ModelKind::Barron {
        return Err(usage("scan needs the barron model"));
    }
    if let Some(s) = &a.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    let alphas = parse_grid(&a.alpha_grid)?;
    let betas = parse_grid(&a.beta_grid)?;
    let deltas = a
        .deltas
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("cannot parse delta `{d}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let bands: Vec<DiagnosticRequest> = alphas
        .iter()
        .flat_map(|&al| betas.iter().filter(move |&&be| al <= be).map(move |&be| (al, be)))
        .map(|(al, be)| DiagnosticRequest::BandMass {
            alpha: Param(al),
            beta: Param(be),
        })
        .collect();
    if bands.is_empty() {
        return Err(usage("band grid is empty (no cell with alpha <= beta)"));
    }
    cfg.diagnostics = bands.clone();
    cfg.validate()?;
    let rep = run_replications(&cfg, a.jobs)?;

    if let Some(parent) = a.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(&a.out)?;
    w.write_record(["alpha", "beta", "delta", "seeds_with_excursion", "seeds", "frequency"])?;
    let total = rep.records.len();
    for band in &bands {
        let DiagnosticRequest::BandMass { alpha, beta } = band else {
            unreachable!()
        };
        for &delta in &deltas {
            let mut hits = 0;
            for r in &rep.records {
                if excursion_count(&r.table, &band.stem(), delta)?.count > 0 {
                    hits += 1;
                }
            }
            let freq = if total == 0 {
                f64::NAN
            } else {
                hits as f64 / total as f64
            };
            w.write_record([
                alpha.to_string(),
                beta.to_string(),
                delta.to_string(),
                hits.to_string(),
                total.to_string(),
                freq.to_string(),
            ])?;
        }
    }
    w.flush()?;
    info!(
        "{} band(s) x {} threshold(s) written to {}",
        bands.len(),
        deltas.len(),
        a.out.display()
    );
    failures_to_result(&rep)
}
