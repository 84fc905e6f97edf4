//! Finite-n inconsistency statistics over the Barron posterior.
//!
//! Likelihood ratios are taken against the truth: `R_n(f) = Π f(xᵢ)/f⋆(xᵢ)`.
//! With `ℓ⋆ = Σ ln f⋆(xᵢ)`, every data-consistent step density sits at the
//! per-observation level `ln 2 − ℓ⋆/n`, and `f_θ` (with `u = √θ`) sits at
//! `h(u) = −u² + √2·W_n·u − ℓ⋆/n`. Level sets of `h` on `[0, 1]` are at most
//! two `u`-intervals, so every band query reduces to quadrature over them.

use std::f64::consts::{LN_2, SQRT_2};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::barron::{hellinger_ball_mass, BarronEngine, BracketedValue, GaussSummary, PosteriorSplit, ThetaPosterior};
use crate::error::{Error, Result};

/// A real parameter that may be written as `"ln2"` or `"inf"` in configs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Param(pub f64);

impl Param {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param(v)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == LN_2 {
            f.write_str("ln2")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ln2" => Ok(Param(LN_2)),
            t => t
                .parse::<f64>()
                .map(Param)
                .map_err(|_| Error::Config(format!("not a number: `{s}`"))),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == LN_2 || !self.0.is_finite() {
            s.serialize_str(&self.to_string())
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Param(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The band `α ≤ n⁻¹ ln R_n ≤ β`, in nats per observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub alpha: Param,
    pub beta: Param,
}

impl BandSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let b = BandSpec {
            alpha: Param(alpha),
            beta: Param(beta),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.alpha.0, self.beta.0);
        if !(a > 0.0 && a <= b && b.is_finite()) {
            return Err(Error::Domain(format!(
                "band needs 0 < alpha <= beta < inf, got ({a}, {b})"
            )));
        }
        Ok(())
    }

    fn contains(&self, level: f64) -> bool {
        self.alpha.0 <= level && level <= self.beta.0
    }
}

/// A posterior evaluated once at the current sample size, shared by every
/// diagnostic at that grid point.
pub struct Snapshot<'a> {
    pub engine: &'a BarronEngine,
    pub split: PosteriorSplit,
    pub theta: ThetaPosterior,
    /// `ℓ⋆ = Σ ln f⋆(xᵢ)`.
    pub truth_loglik: f64,
}

impl<'a> Snapshot<'a> {
    pub fn new(engine: &'a BarronEngine, truth_loglik: f64) -> Result<Self> {
        Ok(Snapshot {
            engine,
            split: engine.split()?,
            theta: engine.theta_posterior()?,
            truth_loglik,
        })
    }

    pub fn n(&self) -> u64 {
        self.engine.n()
    }

    pub fn w_n(&self) -> f64 {
        self.engine.stats().w_n()
    }

    fn truth_per_obs(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.truth_loglik / self.n() as f64
        }
    }

    /// `n⁻¹ ln R_n` of every data-consistent step density.
    pub fn step_level(&self) -> f64 {
        LN_2 - self.truth_per_obs()
    }

    fn quadratic(&self) -> Quadratic {
        Quadratic {
            b: SQRT_2 * self.w_n(),
            c: self.truth_per_obs(),
        }
    }
}

/// `h(u) = −u² + b·u − c` on `u ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Quadratic {
    b: f64,
    c: f64,
}

impl Quadratic {
    /// `{u ∈ [0, 1] : h(u) ≥ t}`, an interval or empty.
    fn superlevel(&self, t: f64) -> Option<(f64, f64)> {
        let q = self.c + t;
        let disc = self.b * self.b - 4.0 * q;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // roots of u² − bu + q without cancellation; r1·r2 = q
        let (r1, r2) = if self.b >= 0.0 {
            let r2 = 0.5 * (self.b + sq);
            (if r2 > 0.0 { q / r2 } else { 0.0 }, r2)
        } else {
            let r1 = 0.5 * (self.b - sq);
            (r1, q / r1)
        };
        let lo = r1.max(0.0);
        let hi = r2.min(1.0);
        (lo <= hi).then_some((lo, hi))
    }
}

/// Removes the open interval `cut` from `[a, b]`.
fn interval_minus(base: (f64, f64), cut: Option<(f64, f64)>) -> Vec<(f64, f64)> {
    let (a, b) = base;
    let Some((c, d)) = cut else {
        return vec![base];
    };
    let mut out = Vec::new();
    if c > a {
        out.push((a, c.min(b)));
    }
    if d < b {
        out.push((d.max(a), b));
    }
    out.retain(|&(x, y)| y > x);
    out
}

/// `n · max_{u∈[0,1]} (−u² + √2·W_n·u)`, the log of `sup_θ Π f_θ(xᵢ)`.
pub fn sup_loglik_f0(w_n: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("sup_loglik_f0 needs n >= 1".into()));
    }
    let b = SQRT_2 * w_n;
    let u = (0.5 * b).clamp(0.0, 1.0);
    Ok(n as f64 * (-u * u + b * u))
}

/// `sup_θ ln R_n(f_θ)` against the truth.
pub fn sup_loglik_ratio(snap: &Snapshot) -> Result<f64> {
    Ok(sup_loglik_f0(snap.w_n(), snap.n())? - snap.truth_loglik)
}

/// `Π({f : R_n(f) = e^{γn}} | x)`.
///
/// The continuous half gives every level set zero mass (the prior on `θ` is
/// diffuse and `h` is not constant), so only the step half can contribute,
/// and it does exactly when its realized level `ln 2 − ℓ⋆/n` equals `γ`. At
/// `n = 0` every density attains `R₀ = 1`; by convention the statistic is
/// then the prior mass of the step half.
pub fn gamma_stat(snap: &Snapshot, gamma: f64) -> BracketedValue {
    if snap.n() == 0 {
        return BracketedValue::exact(snap.engine.prior.ln_step_weight());
    }
    let level = snap.step_level();
    if (level - gamma).abs() <= 1e-12 * gamma.abs().max(1.0) {
        snap.split.mass_fstep
    } else {
        BracketedValue::zero()
    }
}

/// Step-half and continuous-half parts of the band posterior mass.
pub fn band_posterior_parts(snap: &Snapshot, band: &BandSpec) -> Result<(BracketedValue, BracketedValue)> {
    band.validate()?;
    if snap.n() == 0 {
        // R₀ ≡ 1, so the level n⁻¹ ln R_n is 0 for every density and α > 0
        // excludes all of them
        return Ok((BracketedValue::zero(), BracketedValue::zero()));
    }
    let step = if band.contains(snap.step_level()) {
        snap.split.mass_fstep
    } else {
        BracketedValue::zero()
    };
    let intervals = band_intervals(snap.quadratic(), band);
    let f0 = if intervals.is_empty() {
        BracketedValue::zero()
    } else {
        snap.split.mass_f0.mul(&snap.theta.u_intervals_mass(&intervals)?)
    };
    Ok((step, f0))
}

fn band_intervals(h: Quadratic, band: &BandSpec) -> Vec<(f64, f64)> {
    match h.superlevel(band.alpha.0) {
        None => Vec::new(),
        Some(base) => interval_minus(base, h.superlevel(band.beta.0)),
    }
}

/// `Π({e^{αn} ≤ R_n ≤ e^{βn}} | x)`.
pub fn band_posterior_mass(snap: &Snapshot, band: &BandSpec) -> Result<BracketedValue> {
    let (s, f) = band_posterior_parts(snap, band)?;
    Ok(s.add(&f).clamp_probability())
}

/// Prior mass `Π({α ≤ n⁻¹ ln R_n ≤ β})` of the data-dependent band set.
pub fn band_prior_mass(snap: &Snapshot, band: &BandSpec) -> Result<BracketedValue> {
    band.validate()?;
    if snap.n() == 0 {
        return Err(Error::Precondition("band prior mass needs n >= 1".into()));
    }
    let engine = snap.engine;
    let step = if band.contains(snap.step_level()) {
        engine.step_marginal(false)?.value.scale(engine.prior.ln_step_weight())
    } else {
        BracketedValue::zero()
    };
    let intervals = band_intervals(snap.quadratic(), band);
    let f0 = if intervals.is_empty() {
        BracketedValue::zero()
    } else {
        ThetaPosterior::from_summary(GaussSummary::prior(), engine.quadrature)?
            .u_intervals_mass(&intervals)?
            .scale(engine.prior.ln_continuous_weight())
    };
    Ok(step.add(&f0).clamp_probability())
}

/// `−n⁻¹ ln Π({α ≤ n⁻¹ ln R_n ≤ β})`, evaluated at the log-midpoint of the
/// prior-mass bracket; `+∞` when the set has zero prior mass.
pub fn band_prior_exponent(snap: &Snapshot, band: &BandSpec) -> Result<f64> {
    let m = band_prior_mass(snap, band)?;
    if m.upper.is_zero() {
        return Ok(f64::INFINITY);
    }
    let ln_mid = if m.lower.is_zero() {
        m.upper.ln()
    } else {
        0.5 * (m.lower.ln() + m.upper.ln())
    };
    Ok(-ln_mid / snap.n() as f64)
}

/// Whether `{θ : n⁻¹ ln R_n(f_θ) > β}` is empty, decided through
/// [`sup_loglik_ratio`] so that the two conditions agree exactly.
pub fn beta_region_empty(snap: &Snapshot, beta: f64) -> Result<bool> {
    if snap.n() == 0 {
        return Ok(beta >= 0.0);
    }
    Ok(sup_loglik_ratio(snap)? / snap.n() as f64 <= beta)
}

/// Step and `F₀` contributions to `Π({R_n > e^{βn}} | x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBoundParts {
    pub step: BracketedValue,
    pub f0: BracketedValue,
}

pub fn beta_bound_parts(snap: &Snapshot, beta: f64) -> Result<BetaBoundParts> {
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
    }
    if snap.n() == 0 {
        return Ok(BetaBoundParts {
            step: BracketedValue::zero(),
            f0: BracketedValue::zero(),
        });
    }
    // every step density has the same R_n = 2ⁿ / Π f⋆(xᵢ)
    let step = if snap.step_level() > beta {
        snap.split.mass_fstep
    } else {
        BracketedValue::zero()
    };
    let f0 = if beta_region_empty(snap, beta)? {
        BracketedValue::zero()
    } else {
        match snap.quadratic().superlevel(beta) {
            Some(iv) if iv.1 > iv.0 => snap.split.mass_f0.mul(&snap.theta.u_intervals_mass(&[iv])?),
            _ => BracketedValue::zero(),
        }
    };
    Ok(BetaBoundParts { step, f0 })
}

/// `Π({R_n > e^{βn}} | x)`.
pub fn beta_bound_mass(snap: &Snapshot, beta: f64) -> Result<BracketedValue> {
    let p = beta_bound_parts(snap, beta)?;
    Ok(p.step.add(&p.f0).clamp_probability())
}

/// `Π({d_h(f, f₀) > ε} | x)` with distances to the uniform.
pub fn hellinger_mass(snap: &Snapshot, eps: f64) -> Result<BracketedValue> {
    hellinger_ball_mass(&snap.split, &snap.theta, eps)
}

/// `ln ∫ R_n dΠ ≥ −τn`, tested on the lower end of the evidence bracket.
pub fn evidence_flag(snap: &Snapshot, tau: f64) -> Result<bool> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let ev = snap.split.evidence(&snap.engine.prior);
    Ok(ev.lower.ln() - snap.truth_loglik >= -tau * snap.n() as f64)
}

/// Per-grid-point diagnostic values in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub columns: Vec<String>,
    pub grid: Vec<u64>,
    pub rows: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Resolves a statistic to a column: an exact column name, or a
    /// bracketed statistic's base name (its `.lower` column).
    pub fn resolve(&self, statistic: &str) -> Result<usize> {
        self.column_index(statistic)
            .or_else(|| self.column_index(&format!("{statistic}.lower")))
            .ok_or_else(|| Error::UnknownStatistic(statistic.to_string()))
    }

    pub fn series(&self, statistic: &str) -> Result<Vec<f64>> {
        let j = self.resolve(statistic)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Grid points where a statistic (its bracket's lower end) exceeds `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excursions {
    pub count: usize,
    pub indices: Vec<usize>,
    pub n_values: Vec<u64>,
}

pub fn excursion_count(traj: &Trajectory, statistic: &str, delta: f64) -> Result<Excursions> {
    if traj.grid.is_empty() {
        return Err(Error::Precondition(
            "excursion count needs a nonempty trajectory".into(),
        ));
    }
    let series = traj.series(statistic)?;
    let indices: Vec<usize> = series
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > delta)
        .map(|(i, _)| i)
        .collect();
    Ok(Excursions {
        count: indices.len(),
        n_values: indices.iter().map(|&i| traj.grid[i]).collect(),
        indices,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccumulationScan {
    pub indices: Vec<usize>,
    pub last: Option<usize>,
    pub count: usize,
}

/// Grid indices where an exponent series is within `tol` of `γ`.
pub fn accumulation_scan(traj: &Trajectory, column: &str, gamma: f64, tol: f64) -> Result<AccumulationScan> {
    let series = traj.series(column)?;
    let indices: Vec<usize> = series
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - gamma).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    Ok(AccumulationScan {
        last: indices.last().copied(),
        count: indices.len(),
        indices,
    })
}

/// One diagnostic with its parameters, as named in configs and columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagnosticRequest {
    GammaStat {
        gamma: Param,
    },
    BandMass {
        alpha: Param,
        beta: Param,
    },
    BandPriorExponent {
        alpha: Param,
        beta: Param,
    },
    BetaBoundMass {
        beta: Param,
    },
    SupLoglik,
    HellingerMass {
        eps: Param,
    },
    EvidenceFlag {
        tau: Param,
    },
    /// Posterior mean of `1/N` within the step half.
    MeanInverseLevel,
    /// Kolmogorov distance of the step-half predictive to the uniform.
    PredictiveKs {
        grid: usize,
    },
    /// Cosine model: posterior mass of `{d_h(f_θ, f₀) > ε}`.
    CosineHellingerMass {
        eps: Param,
    },
    /// Cosine model: posterior mass of `θ ∈ [lo, hi]`.
    CosineRegionMass {
        lo: Param,
        hi: Param,
    },
}

impl DiagnosticRequest {
    pub fn base_name(&self) -> &'static str {
        use DiagnosticRequest::*;
        match self {
            GammaStat { .. } => "gamma_stat",
            BandMass { .. } => "band_mass",
            BandPriorExponent { .. } => "band_prior_exponent",
            BetaBoundMass { .. } => "beta_bound_mass",
            SupLoglik => "sup_loglik",
            HellingerMass { .. } => "hellinger_mass",
            EvidenceFlag { .. } => "evidence_flag",
            MeanInverseLevel => "mean_inverse_level",
            PredictiveKs { .. } => "predictive_ks",
            CosineHellingerMass { .. } => "cosine_hellinger_mass",
            CosineRegionMass { .. } => "cosine_region_mass",
        }
    }

    /// Column stem, e.g. `band_mass@0.6:0.75`.
    pub fn stem(&self) -> String {
        use DiagnosticRequest::*;
        let b = self.base_name();
        match self {
            GammaStat { gamma: p }
            | BetaBoundMass { beta: p }
            | HellingerMass { eps: p }
            | EvidenceFlag { tau: p }
            | CosineHellingerMass { eps: p } => format!("{b}@{p}"),
            BandMass { alpha, beta } | BandPriorExponent { alpha, beta } => format!("{b}@{alpha}:{beta}"),
            CosineRegionMass { lo, hi } => format!("{b}@{lo}:{hi}"),
            PredictiveKs { grid } => format!("{b}@{grid}"),
            SupLoglik | MeanInverseLevel => b.to_string(),
        }
    }

    pub fn is_bracketed(&self) -> bool {
        use DiagnosticRequest::*;
        !matches!(
            self,
            SupLoglik | BandPriorExponent { .. } | EvidenceFlag { .. } | PredictiveKs { .. }
        )
    }

    pub fn is_cosine(&self) -> bool {
        matches!(
            self,
            DiagnosticRequest::CosineHellingerMass { .. } | DiagnosticRequest::CosineRegionMass { .. }
        )
    }

    pub fn columns(&self) -> Vec<String> {
        let stem = self.stem();
        if self.is_bracketed() {
            vec![format!("{stem}.lower"), format!("{stem}.upper")]
        } else {
            vec![stem]
        }
    }

    pub fn validate(&self) -> Result<()> {
        use DiagnosticRequest::*;
        let bad = |what: &str, v: f64| Err(Error::Config(format!("{}: invalid {what} {v}", self.base_name())));
        match *self {
            BandMass { alpha, beta } | BandPriorExponent { alpha, beta } => BandSpec { alpha, beta }
                .validate()
                .map_err(|e| Error::Config(e.to_string())),
            BetaBoundMass { beta } if !(beta.0 >= 0.0) => bad("beta", beta.0),
            HellingerMass { eps } | CosineHellingerMass { eps } if !(eps.0 > 0.0) => bad("eps", eps.0),
            EvidenceFlag { tau } if !(tau.0 > 0.0) => bad("tau", tau.0),
            GammaStat { gamma } if !gamma.0.is_finite() => bad("gamma", gamma.0),
            PredictiveKs { grid: 0 } => bad("grid", 0.0),
            CosineRegionMass { lo, hi } if !(lo.0 >= 0.0 && lo.0 <= hi.0) => bad("region lower end", lo.0),
            _ => Ok(()),
        }
    }

    /// Evaluates a Barron-model diagnostic.
    pub fn evaluate_barron(&self, snap: &Snapshot) -> Result<Vec<f64>> {
        use DiagnosticRequest::*;
        let br = |b: BracketedValue| vec![b.lower_value(), b.upper_value()];
        Ok(match *self {
            GammaStat { gamma } => br(gamma_stat(snap, gamma.0)),
            BandMass { alpha, beta } => br(band_posterior_mass(snap, &BandSpec { alpha, beta })?),
            BandPriorExponent { alpha, beta } => vec![band_prior_exponent(snap, &BandSpec { alpha, beta })?],
            BetaBoundMass { beta } => br(beta_bound_mass(snap, beta.0)?),
            SupLoglik => vec![if snap.n() == 0 { 0.0 } else { sup_loglik_ratio(snap)? }],
            HellingerMass { eps } => br(hellinger_mass(snap, eps.0)?),
            EvidenceFlag { tau } => vec![if evidence_flag(snap, tau.0)? { 1.0 } else { 0.0 }],
            MeanInverseLevel => br(snap.engine.levels()?.mean_inverse_level),
            PredictiveKs { grid } => vec![snap.engine.predictive()?.ks_to_uniform(grid)?],
            CosineHellingerMass { .. } | CosineRegionMass { .. } => {
                return Err(Error::Config(format!(
                    "{} applies to the cosine model only",
                    self.base_name()
                )))
            }
        })
    }
}

/// Parses a column stem such as `gamma_stat@ln2`, `band_mass@0.6:0.75` or
/// `sup_loglik`.
impl std::str::FromStr for DiagnosticRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use DiagnosticRequest::*;
        let (name, args) = match s.split_once('@') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Config(format!("cannot parse diagnostic `{s}`"));
        let one = || -> Result<Param> { args.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let two = || -> Result<(Param, Param)> {
            let (a, b) = args.and_then(|a| a.split_once(':')).ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        };
        let req = match name {
            "gamma_stat" => GammaStat { gamma: one()? },
            "band_mass" => {
                let (alpha, beta) = two()?;
                BandMass { alpha, beta }
            }
            "band_prior_exponent" => {
                let (alpha, beta) = two()?;
                BandPriorExponent { alpha, beta }
            }
            "beta_bound_mass" => BetaBoundMass { beta: one()? },
            "hellinger_mass" => HellingerMass { eps: one()? },
            "evidence_flag" => EvidenceFlag { tau: one()? },
            "cosine_hellinger_mass" => CosineHellingerMass { eps: one()? },
            "cosine_region_mass" => {
                let (lo, hi) = two()?;
                CosineRegionMass { lo, hi }
            }
            "predictive_ks" => PredictiveKs {
                grid: args.ok_or_else(bad)?.parse().map_err(|_| bad())?,
            },
            "sup_loglik" if args.is_none() => SupLoglik,
            "mean_inverse_level" if args.is_none() => MeanInverseLevel,
            _ => return Err(bad()),
        };
        req.validate()?;
        Ok(req)
    }
}

/// Default diagnostic set for Barron-model runs.
pub fn default_barron_diagnostics() -> Vec<DiagnosticRequest> {
    use DiagnosticRequest::*;
    let ln2 = Param(LN_2);
    vec![
        GammaStat { gamma: ln2 },
        BandMass {
            alpha: Param(0.6),
            beta: Param(0.75),
        },
        BandMass {
            alpha: Param(0.2),
            beta: Param(0.4),
        },
        BandPriorExponent { alpha: ln2, beta: ln2 },
        BetaBoundMass { beta: ln2 },
        SupLoglik,
        HellingerMass { eps: Param(0.5) },
        EvidenceFlag { tau: Param(0.1) },
    ]
}

/// Default diagnostic set for cosine-model runs.
pub fn default_cosine_diagnostics() -> Vec<DiagnosticRequest> {
    use DiagnosticRequest::*;
    vec![
        CosineHellingerMass { eps: Param(0.3) },
        CosineRegionMass {
            lo: Param(5.0),
            hi: Param(f64::INFINITY),
        },
    ]
}
