//! Exact posterior for the mixture prior `Π = w·Π₀ + (1−w)·Π_△`.
//!
//! Both halves are evaluated relative to the uniform density, so the
//! likelihood of `f` is `R_n(f) = Π f(xᵢ)` under uniform data. The continuous
//! half is one quadrature; the step half is an exactly summable series over
//! partition levels with an analytic tail bracket.

pub mod bracket;
pub mod gauss;
pub mod stats;
pub mod step;

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

pub use bracket::{normalize_pair, BracketedValue, COMBINE_SLACK};
pub use gauss::{gauss_marginal, prior_kl_ball_mass, GaussSummary, ThetaPosterior, Z0};
pub use stats::{update_stats, OccupancyStats, SufficientStats};
pub use step::{
    log_step_term, posterior_over_levels, step_marginal, step_marginal_at, step_partial_sum, step_predictive_density,
    LevelPosterior, StepMarginal, StepPredictive, TruncationPolicy,
};

use crate::error::{Error, Result};
use crate::numerics::{LogWeight, QuadratureOptions, QuadratureResult};

/// Weights of the two halves of the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarronPriorConfig {
    /// Prior mass of the continuous half `F₀`.
    pub continuous_weight: f64,
}

impl Default for BarronPriorConfig {
    fn default() -> Self {
        BarronPriorConfig { continuous_weight: 0.5 }
    }
}

impl BarronPriorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.continuous_weight) {
            return Err(Error::Config(format!(
                "continuous_weight must lie in [0, 1], got {}",
                self.continuous_weight
            )));
        }
        Ok(())
    }

    pub fn ln_continuous_weight(&self) -> LogWeight {
        LogWeight::from_value(self.continuous_weight)
    }

    pub fn ln_step_weight(&self) -> LogWeight {
        LogWeight::from_value(1.0 - self.continuous_weight)
    }

    /// `6/(π²N²)`.
    pub fn step_level_weight(level: u64) -> f64 {
        step::ln_level_weight(level).exp()
    }

    pub fn ln_theta_prior(theta: f64) -> f64 {
        gauss::ln_theta_prior(theta)
    }
}

/// Posterior masses of the two halves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSplit {
    pub mass_f0: BracketedValue,
    pub mass_fstep: BracketedValue,
    /// Marginal likelihood of the continuous half (before prior weighting).
    pub gauss: QuadratureResult,
    /// Marginal likelihood of the step half (before prior weighting).
    pub step: StepMarginal,
}

impl PosteriorSplit {
    /// `ln` of the total evidence `∫ R_n dΠ`, bracketed.
    pub fn evidence(&self, cfg: &BarronPriorConfig) -> BracketedValue {
        BracketedValue::from_quadrature(&self.gauss)
            .scale(cfg.ln_continuous_weight())
            .add(&self.step.value.scale(cfg.ln_step_weight()))
    }
}

pub fn posterior_split(
    stats: &SufficientStats,
    occ: &OccupancyStats,
    cfg: &BarronPriorConfig,
    trunc: &TruncationPolicy,
    opts: QuadratureOptions,
) -> Result<PosteriorSplit> {
    cfg.validate()?;
    let gauss = gauss_marginal(stats, opts)?;
    let step = step_marginal(occ, stats.n(), true, trunc)?;
    let a = BracketedValue::from_quadrature(&gauss).scale(cfg.ln_continuous_weight());
    let b = step.value.scale(cfg.ln_step_weight());
    if a.upper.is_zero() && b.upper.is_zero() {
        return Err(Error::UndefinedPosterior);
    }
    let (mass_f0, mass_fstep) = normalize_pair(&a, &b);
    Ok(PosteriorSplit {
        mass_f0,
        mass_fstep,
        gauss,
        step,
    })
}

/// `d_h` between the uniform and every step density.
pub fn step_uniform_distance() -> f64 {
    (2.0 - SQRT_2).sqrt()
}

/// `θ` above which `d_h(f_θ, f₀) > ε`, from `d_h² = 2 − 2e^{−θ/4}`.
pub fn hellinger_theta_threshold(eps: f64) -> f64 {
    -4.0 * (-0.5 * eps * eps).ln_1p()
}

/// Posterior mass of `{f : d_h(f, f₀) > ε}`, distances measured to the
/// uniform.
pub fn hellinger_ball_mass(split: &PosteriorSplit, theta: &ThetaPosterior, eps: f64) -> Result<BracketedValue> {
    if !(eps > 0.0) || eps.is_nan() {
        return Err(Error::Domain(format!("Hellinger radius must be positive, got {eps}")));
    }
    if eps >= SQRT_2 {
        return Ok(BracketedValue::zero());
    }
    let step_part = if eps < step_uniform_distance() {
        split.mass_fstep
    } else {
        BracketedValue::zero()
    };
    let t = hellinger_theta_threshold(eps);
    let f0_part = if t >= 1.0 {
        BracketedValue::zero()
    } else {
        split.mass_f0.mul(&theta.interval_mass(t, 1.0)?)
    };
    Ok(step_part.add(&f0_part).clamp_probability())
}

/// Incrementally updated posterior state for one data stream.
#[derive(Debug, Clone)]
pub struct BarronEngine {
    pub prior: BarronPriorConfig,
    pub truncation: TruncationPolicy,
    pub quadrature: QuadratureOptions,
    stats: SufficientStats,
    occ: OccupancyStats,
}

impl BarronEngine {
    pub fn new(prior: BarronPriorConfig, truncation: TruncationPolicy) -> Result<Self> {
        prior.validate()?;
        Ok(BarronEngine {
            prior,
            truncation,
            quadrature: QuadratureOptions::default(),
            stats: SufficientStats::new(),
            occ: OccupancyStats::new(),
        })
    }

    pub fn observe(&mut self, x: f64) -> Result<()> {
        update_stats(&mut self.stats, &mut self.occ, x)
    }

    pub fn extend(&mut self, xs: &[f64]) -> Result<()> {
        xs.iter().try_for_each(|&x| self.observe(x))
    }

    /// Rebuilds the occupancy counts from the sorted sample and checks them
    /// against the incremental ones.
    pub fn audit(&self) -> Result<()> {
        if OccupancyStats::recompute(&self.stats)? != self.occ {
            return Err(Error::Precondition(
                "incremental occupancy disagrees with a full recount".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.stats.n()
    }

    pub fn stats(&self) -> &SufficientStats {
        &self.stats
    }

    pub fn occupancy(&self) -> &OccupancyStats {
        &self.occ
    }

    pub fn split(&self) -> Result<PosteriorSplit> {
        posterior_split(&self.stats, &self.occ, &self.prior, &self.truncation, self.quadrature)
    }

    pub fn theta_posterior(&self) -> Result<ThetaPosterior> {
        ThetaPosterior::new(&self.stats, self.quadrature)
    }

    pub fn step_marginal(&self, with_likelihood: bool) -> Result<StepMarginal> {
        step_marginal(&self.occ, self.stats.n(), with_likelihood, &self.truncation)
    }

    pub fn levels(&self) -> Result<LevelPosterior> {
        posterior_over_levels(&self.occ, self.stats.n(), &self.truncation)
    }

    pub fn hellinger_ball_mass(&self, eps: f64) -> Result<BracketedValue> {
        hellinger_ball_mass(&self.split()?, &self.theta_posterior()?, eps)
    }

    pub fn predictive(&self) -> Result<StepPredictive<'_>> {
        StepPredictive::new(&self.stats, &self.occ, &self.truncation)
    }
}
