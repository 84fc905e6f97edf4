use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::barron::{BarronPriorConfig, TruncationPolicy};
use crate::cosine::CosinePriorConfig;
use crate::density::{GaussExpDensity, StepDensity};
use crate::diagnostics::{default_barron_diagnostics, default_cosine_diagnostics, DiagnosticRequest};
use crate::error::{Error, Result};

/// The data-generating density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruthSpec {
    Uniform,
    GaussExp {
        theta: f64,
    },
    Step {
        level: u64,
        selected: Vec<u64>,
    },
    /// Observations replayed from a CSV file, in file order. Likelihood
    /// ratios are taken against the uniform.
    File {
        path: PathBuf,
    },
}

impl TruthSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            TruthSpec::Uniform | TruthSpec::File { .. } => Ok(()),
            TruthSpec::GaussExp { theta } => GaussExpDensity::new(*theta).map(|_| ()),
            TruthSpec::Step { level, selected } => StepDensity::new(*level, selected.iter().copied()).map(|_| ()),
        }
        .map_err(|e| Error::Config(format!("truth: {e}")))
    }
}

/// `uniform`, `gauss:θ`, `step:N:i,j,…` or `file:PATH`.
impl FromStr for TruthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("invalid truth `{s}`: {why}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind {
            "uniform" if rest.is_empty() => TruthSpec::Uniform,
            "gauss" => TruthSpec::GaussExp {
                theta: rest.parse().map_err(|_| bad("expected gauss:THETA"))?,
            },
            "step" => {
                let (level, idx) = rest.split_once(':').ok_or_else(|| bad("expected step:N:i,j,..."))?;
                let level = level.parse().map_err(|_| bad("level is not an integer"))?;
                let selected = idx
                    .split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("cell list is not a list of integers"))?;
                TruthSpec::Step { level, selected }
            }
            "file" if !rest.is_empty() => TruthSpec::File { path: rest.into() },
            _ => return Err(bad("expected uniform, gauss:THETA, step:N:IDX or file:PATH")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for TruthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruthSpec::Uniform => f.write_str("uniform"),
            TruthSpec::GaussExp { theta } => write!(f, "gauss:{theta}"),
            TruthSpec::Step { level, selected } => {
                let idx: Vec<String> = selected.iter().map(u64::to_string).collect();
                write!(f, "step:{level}:{}", idx.join(","))
            }
            TruthSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Barron,
    Cosine,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "barron" => Ok(ModelKind::Barron),
            "cosine" => Ok(ModelKind::Cosine),
            _ => Err(Error::Config(format!(
                "unknown model `{s}` (expected barron or cosine)"
            ))),
        }
    }
}

/// Everything that determines a run, apart from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub truth: TruthSpec,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub barron_prior: BarronPriorConfig,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    #[serde(default)]
    pub cosine_prior: CosinePriorConfig,
    pub n_max: u64,
    #[serde(default = "default_grid_ratio")]
    pub grid_ratio: f64,
    #[serde(default = "default_rel_tol")]
    pub quadrature_rel_tol: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Empty means the model's default set.
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticRequest>,
}

fn default_grid_ratio() -> f64 {
    1.15
}

fn default_rel_tol() -> f64 {
    1e-10
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

impl RunConfig {
    pub fn new(truth: TruthSpec, model: ModelKind, n_max: u64) -> Self {
        RunConfig {
            truth,
            model,
            barron_prior: BarronPriorConfig::default(),
            truncation: TruncationPolicy::default(),
            cosine_prior: CosinePriorConfig::default(),
            n_max,
            grid_ratio: default_grid_ratio(),
            quadrature_rel_tol: default_rel_tol(),
            seeds: default_seeds(),
            diagnostics: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.truth.validate()?;
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if !(self.grid_ratio > 1.0 && self.grid_ratio.is_finite()) {
            return Err(Error::Config(format!(
                "grid_ratio must exceed 1, got {}",
                self.grid_ratio
            )));
        }
        if !(self.quadrature_rel_tol > 0.0 && self.quadrature_rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "quadrature_rel_tol must lie in (0, 1), got {}",
                self.quadrature_rel_tol
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be nonempty".into()));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(Error::Config("seeds must be distinct".into()));
        }
        self.barron_prior.validate()?;
        self.cosine_prior.validate()?;
        if let Some(m) = self.truncation.fixed {
            if m == 0 {
                return Err(Error::Config("fixed truncation level must be positive".into()));
            }
        }
        let mut seen = BTreeSet::new();
        for d in self.effective_diagnostics() {
            d.validate()?;
            if d.is_cosine() != (self.model == ModelKind::Cosine) {
                return Err(Error::Config(format!(
                    "diagnostic `{}` does not apply to the {:?} model",
                    d.base_name(),
                    self.model
                )));
            }
            if !seen.insert(d.stem()) {
                return Err(Error::Config(format!("diagnostic `{}` requested twice", d.stem())));
            }
        }
        Ok(())
    }

    pub fn effective_diagnostics(&self) -> Vec<DiagnosticRequest> {
        if !self.diagnostics.is_empty() {
            return self.diagnostics.clone();
        }
        match self.model {
            ModelKind::Barron => default_barron_diagnostics(),
            ModelKind::Cosine => default_cosine_diagnostics(),
        }
    }

    /// The config with defaults made explicit and seeds sorted; hashing and
    /// persistence use this form.
    pub fn normalized(&self) -> RunConfig {
        let mut c = self.clone();
        c.diagnostics = self.effective_diagnostics();
        c.seeds.sort_unstable();
        c
    }

    /// Key-sorted compact JSON of the normalized config.
    pub fn canonical_json(&self) -> Result<String> {
        // serde_json's default map is ordered by key
        let v = serde_json::to_value(self.normalized())?;
        Ok(serde_json::to_string(&v)?)
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn config_hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_json()?.as_bytes())))
    }
}

/// Evaluation points: every `n` in `1..=10`, then a geometric sequence with
/// the given ratio, always ending at `n_max`.
pub fn evaluation_grid(n_max: u64, ratio: f64) -> Result<Vec<u64>> {
    if n_max < 1 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::Config(format!("grid ratio must exceed 1, got {ratio}")));
    }
    let mut grid: Vec<u64> = (1..=n_max.min(10)).collect();
    let mut x = 10.0f64;
    loop {
        x *= ratio;
        let last = *grid.last().unwrap();
        let next = (x.round() as u64).max(last + 1);
        if next >= n_max {
            break;
        }
        grid.push(next);
    }
    if *grid.last().unwrap() != n_max {
        grid.push(n_max);
    }
    Ok(grid)
}
