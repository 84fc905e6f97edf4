//! Posterior for the cosine family `f_θ(x) = (1 + cos θx)/c(θ)` on `θ ≥ 0`.
//!
//! The posterior is integrated on `[0, cap]` and the rest is bracketed by the
//! prior tail mass times a likelihood bound: for `θ > cap > 1`,
//! `f_θ ≤ 2/c(θ) ≤ 2/(1 − 1/cap)`, so `L(θ) ≤ (2/(1 − 1/cap))ⁿ`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::barron::{normalize_pair, BracketedValue};
use crate::density::{cosine_logpdf_unchecked, cosine_normalizer};
use crate::error::{Error, Result};
use crate::numerics::{integrate_log, log_sum_exp, LogWeight, QuadratureOptions, QuadratureResult};

/// Prior on `θ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CosinePrior {
    Exponential { rate: f64 },
    HalfCauchy { scale: f64 },
    TruncatedUniform { max: f64 },
}

/// `exponential:RATE`, `half-cauchy:SCALE` or `uniform:MAX`.
impl std::str::FromStr for CosinePrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse cosine prior `{s}`"));
        let (kind, v) = s.split_once(':').ok_or_else(bad)?;
        let v: f64 = v.parse().map_err(|_| bad())?;
        let p = match kind {
            "exponential" => CosinePrior::Exponential { rate: v },
            "half-cauchy" => CosinePrior::HalfCauchy { scale: v },
            "uniform" => CosinePrior::TruncatedUniform { max: v },
            _ => return Err(bad()),
        };
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }
}

impl Default for CosinePrior {
    fn default() -> Self {
        CosinePrior::Exponential { rate: 1.0 }
    }
}

impl CosinePrior {
    pub fn validate(&self) -> Result<()> {
        let (what, v) = match *self {
            CosinePrior::Exponential { rate } => ("rate", rate),
            CosinePrior::HalfCauchy { scale } => ("scale", scale),
            CosinePrior::TruncatedUniform { max } => ("max", max),
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!(
                "cosine prior {what} must be positive and finite, got {v}"
            )));
        }
        Ok(())
    }

    pub fn ln_pdf(&self, theta: f64) -> f64 {
        if theta < 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            CosinePrior::Exponential { rate } => rate.ln() - rate * theta,
            CosinePrior::HalfCauchy { scale } => {
                let r = theta / scale;
                (2.0 / (PI * scale)).ln() - (r * r).ln_1p()
            }
            CosinePrior::TruncatedUniform { max } => {
                if theta <= max {
                    -max.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// `Π(θ > t)`.
    pub fn tail(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match *self {
            CosinePrior::Exponential { rate } => (-rate * t).exp(),
            CosinePrior::HalfCauchy { scale } => 2.0 / PI * (scale / t).atan(),
            CosinePrior::TruncatedUniform { max } => (1.0 - t / max).max(0.0),
        }
    }

    /// `Π(a < θ ≤ b)`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match *self {
            // 1 − e^{−λ(b−a)} without cancellation
            CosinePrior::Exponential { rate } => self.tail(a) * -(-rate * (b - a.max(0.0))).exp_m1(),
            _ => (self.tail(a) - self.tail(b)).max(0.0),
        }
    }

    /// Upper end of the support, if bounded.
    pub fn support_end(&self) -> Option<f64> {
        match *self {
            CosinePrior::TruncatedUniform { max } => Some(max),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CosinePriorConfig {
    pub prior: CosinePrior,
    /// Target ratio of the tail bound to the integrated head.
    pub tail_tolerance: f64,
    /// Largest integration cap tried before reporting a wide bracket.
    pub max_cap: f64,
    pub rel_tol: f64,
}

impl Default for CosinePriorConfig {
    fn default() -> Self {
        CosinePriorConfig {
            prior: CosinePrior::default(),
            tail_tolerance: 1e-3,
            max_cap: 4000.0,
            rel_tol: 1e-9,
        }
    }
}

impl CosinePriorConfig {
    pub fn validate(&self) -> Result<()> {
        self.prior.validate()?;
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tail_tolerance must be positive, got {}",
                self.tail_tolerance
            )));
        }
        if !(self.max_cap >= MIN_CAP && self.max_cap.is_finite()) {
            return Err(Error::Config(format!(
                "max_cap must be at least {MIN_CAP}, got {}",
                self.max_cap
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

const MIN_CAP: f64 = 10.0;

/// `Σ ln f_θ(xᵢ)`.
pub fn cosine_loglik(theta: f64, data: &[f64]) -> Result<LogWeight> {
    if !(theta >= 0.0) {
        return Err(Error::Domain(format!("cosine theta must be >= 0, got {theta}")));
    }
    if let Some(&x) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("cosine data must lie in [0, 1], got {x}")));
    }
    Ok(loglik_unchecked(theta, data))
}

fn loglik_unchecked(theta: f64, data: &[f64]) -> LogWeight {
    let ln_c = cosine_normalizer(theta).ln();
    let mut acc = 0.0;
    for &x in data {
        let t = cosine_logpdf_unchecked(theta, x, ln_c);
        if t.is_zero() {
            return LogWeight::ZERO;
        }
        acc += t.ln();
    }
    LogWeight::from_ln(acc)
}

/// `∫₀¹ √f_θ(x) dx = √2·(2/θ)·F(θ/2)/√c(θ)` with `F(Y) = ∫₀^Y |cos y| dy`.
pub fn cosine_affinity_uniform(theta: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    let y = 0.5 * theta;
    let m = (y / PI).floor();
    let r = y - m * PI;
    let g = if r <= FRAC_PI_2 { r.sin() } else { 2.0 - r.sin() };
    let f = 2.0 * m + g;
    SQRT_2 * f / y / cosine_normalizer(theta).sqrt()
}

/// `d_h(f_θ, f₀)`.
pub fn cosine_hellinger_uniform(theta: f64) -> f64 {
    (2.0 - 2.0 * cosine_affinity_uniform(theta)).max(0.0).sqrt()
}

/// `{θ ∈ [0, cap] : d_h(f_θ, f₀) > ε}` as disjoint intervals.
pub fn hellinger_exceedance_set(eps: f64, cap: f64) -> Vec<(f64, f64)> {
    let thr = 1.0 - 0.5 * eps * eps;
    let outside = |t: f64| cosine_affinity_uniform(t) < thr;
    let steps = (cap / 0.02).ceil().max(1.0) as usize;
    let h = cap / steps as f64;
    let bisect = |mut a: f64, mut b: f64| {
        let fa = outside(a);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if outside(m) == fa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut out = Vec::new();
    let mut start = outside(0.0).then_some(0.0);
    let mut prev = 0.0;
    for i in 1..=steps {
        let t = if i == steps { cap } else { i as f64 * h };
        let now = outside(t);
        match (start, now) {
            (None, true) => start = Some(bisect(prev, t)),
            (Some(s), false) => {
                out.push((s, bisect(prev, t)));
                start = None;
            }
            _ => {}
        }
        prev = t;
    }
    if let Some(s) = start {
        out.push((s, cap));
    }
    out
}

fn complement(intervals: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cur = lo;
    for &(a, b) in intervals {
        if a > cur {
            out.push((cur, a.min(hi)));
        }
        cur = cur.max(b);
    }
    if cur < hi {
        out.push((cur, hi));
    }
    out.retain(|&(a, b)| b > a);
    out
}

fn sum_quadrature(parts: &[QuadratureResult]) -> QuadratureResult {
    QuadratureResult {
        ln_estimate: log_sum_exp(parts.iter().map(|q| q.ln_estimate)),
        ln_abs_error: log_sum_exp(parts.iter().map(|q| q.ln_abs_error)),
        evaluations: parts.iter().map(|q| q.evaluations).sum(),
    }
}

/// Posterior over `θ` for one dataset, with the integration cap fixed.
#[derive(Debug, Clone)]
pub struct CosinePosterior {
    cfg: CosinePriorConfig,
    data: Vec<f64>,
    spacing: f64,
    cap: f64,
    /// `ln` of the likelihood bound beyond the cap.
    ln_tail_lik: f64,
    head: QuadratureResult,
}

impl CosinePosterior {
    pub fn new(cfg: CosinePriorConfig, data: &[f64]) -> Result<Self> {
        cfg.validate()?;
        if let Some(&x) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("cosine data must lie in [0, 1], got {x}")));
        }
        let max_x = data.iter().copied().fold(0.0, f64::max);
        let spacing = if max_x > 0.0 { (PI / max_x).min(PI) } else { PI };
        let mut post = CosinePosterior {
            cfg,
            data: data.to_vec(),
            spacing,
            cap: MIN_CAP,
            ln_tail_lik: 0.0,
            head: QuadratureResult::zero(),
        };
        post.choose_cap()?;
        Ok(post)
    }

    fn n(&self) -> f64 {
        self.data.len() as f64
    }

    fn ln_tail_lik_at(&self, cap: f64) -> f64 {
        self.n() * (std::f64::consts::LN_2 - (1.0 - 1.0 / cap).ln())
    }

    fn ln_tail_bound_at(&self, cap: f64) -> f64 {
        self.cfg.prior.tail(cap).ln() + self.ln_tail_lik_at(cap)
    }

    fn choose_cap(&mut self) -> Result<()> {
        if let Some(end) = self.cfg.prior.support_end() {
            self.cap = end;
            self.ln_tail_lik = 0.0;
            self.head = self.integrate(0.0, end)?;
            return Ok(());
        }
        let head0 = self.integrate(0.0, MIN_CAP)?;
        let (lo0, _) = head0.bracket();
        let target = self.cfg.tail_tolerance.ln() + lo0.ln();
        let ok = |c: f64| self.ln_tail_bound_at(c) <= target;
        let mut cap = MIN_CAP;
        if !ok(cap) {
            let mut lo = cap;
            while !ok(cap) && cap < self.cfg.max_cap {
                lo = cap;
                cap = (2.0 * cap).min(self.cfg.max_cap);
            }
            if ok(cap) {
                let mut hi = cap;
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                cap = hi.ceil();
            } else {
                log::warn!(
                    "cosine posterior: tail bound exceeds {} of the head at max_cap {}; bracket will be wide",
                    self.cfg.tail_tolerance,
                    self.cfg.max_cap
                );
            }
        }
        self.cap = cap;
        self.ln_tail_lik = self.ln_tail_lik_at(cap);
        self.head = if cap == MIN_CAP {
            head0
        } else {
            sum_quadrature(&[head0, self.integrate(MIN_CAP, cap)?])
        };
        Ok(())
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Integrated prior × likelihood over `[0, cap]`.
    pub fn head(&self) -> QuadratureResult {
        self.head
    }

    fn ln_integrand(&self, theta: f64) -> f64 {
        self.cfg.prior.ln_pdf(theta) + loglik_unchecked(theta, &self.data).ln()
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        // the likelihood peak near 0 has width of order n^{-1/4}
        if self.n() > 0.0 {
            let w = self.n().powf(-0.25);
            pts.extend(
                [0.125, 0.25, 0.5, 1.0, 2.0, 4.0]
                    .iter()
                    .map(|k| k * w)
                    .filter(|&p| p > a && p < b),
            );
        }
        let mut k = (a / self.spacing).floor() + 1.0;
        while k * self.spacing < b {
            pts.push(k * self.spacing);
            k += 1.0;
        }
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts
    }

    fn integrate(&self, a: f64, b: f64) -> Result<QuadratureResult> {
        if b <= a {
            return Ok(QuadratureResult::zero());
        }
        let opts = QuadratureOptions {
            rel_tol: self.cfg.rel_tol,
            max_evaluations: 400_000,
        };
        integrate_log(|t| self.ln_integrand(t), &self.breakpoints(a, b), opts)
    }

    /// Unnormalized mass of a union of disjoint sorted intervals in `[0, ∞)`.
    fn unnormalized(&self, intervals: &[(f64, f64)]) -> Result<BracketedValue> {
        let mut parts = Vec::new();
        let mut tail_prior = 0.0;
        for &(a, b) in intervals {
            let (a, b) = (a.max(0.0), b);
            if a < self.cap {
                parts.push(self.integrate(a, b.min(self.cap))?);
            }
            if b > self.cap {
                tail_prior += self.cfg.prior.mass(a.max(self.cap), b);
            }
        }
        let head = BracketedValue::from_quadrature(&sum_quadrature(&parts));
        if tail_prior > 0.0 {
            let t = LogWeight::from_ln(tail_prior.ln() + self.ln_tail_lik);
            Ok(head.add(&BracketedValue::new(LogWeight::ZERO, t)))
        } else {
            Ok(head)
        }
    }

    /// Posterior mass of a union of disjoint sorted intervals. The mass and
    /// that of the complement share matched endpoints.
    pub fn intervals_mass(&self, intervals: &[(f64, f64)]) -> Result<BracketedValue> {
        if let Some(&(a, b)) = intervals.iter().find(|(a, b)| !(*a >= 0.0 && b >= a)) {
            return Err(Error::Domain(format!("region must lie in [0, inf), got ({a}, {b})")));
        }
        let inside = self.unnormalized(intervals)?;
        let outside = self.unnormalized(&complement(intervals, 0.0, f64::INFINITY))?;
        if inside.upper.is_zero() && outside.upper.is_zero() {
            return Err(Error::UndefinedPosterior);
        }
        Ok(normalize_pair(&inside, &outside).0)
    }

    /// `Π(lo ≤ θ ≤ hi | x)`.
    pub fn region_mass(&self, lo: f64, hi: f64) -> Result<BracketedValue> {
        if !(lo >= 0.0 && hi >= lo) {
            return Err(Error::Domain(format!("region must lie in [0, inf), got ({lo}, {hi})")));
        }
        self.intervals_mass(&[(lo, hi)])
    }

    /// `Π({θ : d_h(f_θ, f₀) > ε} | x)`.
    pub fn hellinger_mass(&self, eps: f64) -> Result<BracketedValue> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("Hellinger radius must be positive, got {eps}")));
        }
        if eps >= SQRT_2 {
            return Ok(BracketedValue::zero());
        }
        let head_set = hellinger_exceedance_set(eps, self.cap);
        let head_out = complement(&head_set, 0.0, self.cap);
        // beyond the cap the split is unknown: charge the whole tail to both sides
        let tail = (self.cfg.prior.tail(self.cap) > 0.0).then_some((self.cap, f64::INFINITY));
        let with_tail = |mut v: Vec<(f64, f64)>| {
            v.extend(tail);
            v
        };
        let inside = self.unnormalized(&with_tail(head_set))?;
        let outside = self.unnormalized(&with_tail(head_out))?;
        if inside.upper.is_zero() && outside.upper.is_zero() {
            return Err(Error::UndefinedPosterior);
        }
        Ok(normalize_pair(&inside, &outside).0)
    }

    /// Posterior predictive density `∫ f_θ(x) Π(dθ | data)`, bracketed.
    pub fn predictive_density(&self, x: f64) -> Result<BracketedValue> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
        }
        let opts = QuadratureOptions {
            rel_tol: self.cfg.rel_tol,
            max_evaluations: 400_000,
        };
        let num = integrate_log(
            |t| self.ln_integrand(t) + cosine_logpdf_unchecked(t, x, cosine_normalizer(t).ln()).ln(),
            &self.breakpoints(0.0, self.cap),
            opts,
        )?;
        let tail = self.cfg.prior.tail(self.cap);
        let mut num = BracketedValue::from_quadrature(&num);
        let mut den = BracketedValue::from_quadrature(&self.head);
        if tail > 0.0 {
            let ln_t = tail.ln() + self.ln_tail_lik;
            let ln_f = (2.0 / (1.0 - 1.0 / self.cap)).ln();
            num = num.add(&BracketedValue::new(LogWeight::ZERO, LogWeight::from_ln(ln_t + ln_f)));
            den = den.add(&BracketedValue::new(LogWeight::ZERO, LogWeight::from_ln(ln_t)));
        }
        if den.upper.is_zero() {
            return Err(Error::UndefinedPosterior);
        }
        let upper = if den.lower.is_zero() {
            LogWeight::from_ln(f64::INFINITY)
        } else {
            num.upper / den.lower
        };
        Ok(BracketedValue::new(num.lower / den.upper, upper))
    }
}

/// `Π(θ ∈ region | data)` for a `[lo, hi]` region.
pub fn cosine_posterior_mass(cfg: &CosinePriorConfig, data: &[f64], region: (f64, f64)) -> Result<BracketedValue> {
    CosinePosterior::new(*cfg, data)?.region_mass(region.0, region.1)
}

/// `Π({θ : d_h(f_θ, f₀) > ε} | data)`.
pub fn cosine_hellinger_mass(cfg: &CosinePriorConfig, data: &[f64], eps: f64) -> Result<BracketedValue> {
    if eps >= SQRT_2 && eps.is_finite() {
        return Ok(BracketedValue::zero());
    }
    CosinePosterior::new(*cfg, data)?.hellinger_mass(eps)
}

/// Accumulates data for repeated posterior evaluations along a trajectory.
#[derive(Debug, Clone)]
pub struct CosineEngine {
    pub cfg: CosinePriorConfig,
    data: Vec<f64>,
}

impl CosineEngine {
    pub fn new(cfg: CosinePriorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(CosineEngine { cfg, data: Vec::new() })
    }

    pub fn observe(&mut self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("cosine data must lie in [0, 1], got {x}")));
        }
        self.data.push(x);
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.data.len() as u64
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn posterior(&self) -> Result<CosinePosterior> {
        CosinePosterior::new(self.cfg, &self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{hellinger_numeric, CosineDensity, GaussExpDensity};
    use crate::numerics::{uniform_stream, RandomStream};

    #[test]
    fn prior_strings() {
        assert_eq!(
            "exponential:2".parse::<CosinePrior>().unwrap(),
            CosinePrior::Exponential { rate: 2.0 }
        );
        assert_eq!(
            "half-cauchy:1.5".parse::<CosinePrior>().unwrap(),
            CosinePrior::HalfCauchy { scale: 1.5 }
        );
        assert_eq!(
            "uniform:50".parse::<CosinePrior>().unwrap(),
            CosinePrior::TruncatedUniform { max: 50.0 }
        );
        for bad in ["exponential:-1", "gamma:1", "uniform", "uniform:x"] {
            assert!(bad.parse::<CosinePrior>().is_err(), "{bad}");
        }
    }

    fn cfg() -> CosinePriorConfig {
        CosinePriorConfig::default()
    }

    #[test]
    fn loglik_examples() {
        assert_eq!(cosine_loglik(0.0, &[0.1, 0.9, 0.4]).unwrap().ln(), 0.0);
        assert!(cosine_loglik(PI, &[0.3, 1.0]).unwrap().is_zero());
        let v = cosine_loglik(1.0, &[0.5]).unwrap().ln();
        let direct = (1.0 + 0.5f64.cos()).ln() - (1.0 + 1f64.sin()).ln();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.0194204).abs() < 1e-6);
        assert!(cosine_loglik(-1.0, &[0.5]).is_err());
    }

    #[test]
    fn prior_tails_match_quadrature() {
        for p in [
            CosinePrior::Exponential { rate: 1.3 },
            CosinePrior::HalfCauchy { scale: 2.0 },
            CosinePrior::TruncatedUniform { max: 7.0 },
        ] {
            for t in [0.5, 3.0, 6.0] {
                let q =
                    crate::numerics::integrate(|x| p.ln_pdf(x).exp(), 0.0, t, QuadratureOptions::with_rel_tol(1e-12))
                        .unwrap()
                        .estimate();
                assert!((q + p.tail(t) - 1.0).abs() < 1e-9, "{p:?} {t}");
            }
            assert!((p.mass(1.0, 2.0) - (p.tail(1.0) - p.tail(2.0))).abs() < 1e-15);
        }
        assert!(CosinePrior::HalfCauchy { scale: 0.0 }.validate().is_err());
    }

    #[test]
    fn affinity_matches_numeric_hellinger() {
        let u = GaussExpDensity::uniform();
        for theta in [0.0, 0.3, 1.0, 2.5, PI, 5.0, 9.0, 17.3, 30.0] {
            let d = CosineDensity::new(theta).unwrap();
            let numeric = hellinger_numeric(&d, &u).unwrap();
            assert!((cosine_hellinger_uniform(theta) - numeric).abs() < 1e-6, "θ={theta}");
        }
        assert_eq!(cosine_hellinger_uniform(0.0), 0.0);
    }

    #[test]
    fn exceedance_set_agrees_with_pointwise_distance() {
        let set = hellinger_exceedance_set(0.3, 60.0);
        assert!(!set.is_empty() && set[0].0 > 0.0);
        for i in 0..6000 {
            let t = i as f64 * 0.01 + 0.005;
            let inside = set.iter().any(|&(a, b)| a <= t && t <= b);
            let d = cosine_hellinger_uniform(t);
            if (d - 0.3).abs() > 1e-9 {
                assert_eq!(inside, d > 0.3, "θ={t}");
            }
        }
    }

    #[test]
    fn prior_only_masses() {
        let p = CosinePosterior::new(cfg(), &[]).unwrap();
        for t in [0.5, 2.0, 7.0] {
            let m = p.region_mass(t, f64::INFINITY).unwrap();
            assert!(m.contains_value((-t).exp(), 1e-9), "{m:?}");
        }
        let all = p.region_mass(0.0, f64::INFINITY).unwrap();
        assert!(all.lower_value() > 1.0 - 1e-12);
        assert_eq!(
            cosine_hellinger_mass(&cfg(), &[0.2], 1.5).unwrap(),
            BracketedValue::zero()
        );
    }

    #[test]
    fn single_point_matches_trapezoid() {
        let c = CosinePriorConfig {
            prior: CosinePrior::TruncatedUniform { max: 20.0 },
            ..cfg()
        };
        for x in [0.2, 0.75] {
            let p = CosinePosterior::new(c, &[x]).unwrap();
            let dens = |t: f64| (1.0 + (t * x).cos()) / cosine_normalizer(t);
            let trap = |a: f64, b: f64| {
                let m = 200_000;
                let h = (b - a) / m as f64;
                (0..=m)
                    .map(|i| dens(a + i as f64 * h) * if i == 0 || i == m { 0.5 } else { 1.0 })
                    .sum::<f64>()
                    * h
            };
            let z = trap(0.0, 20.0);
            for (a, b) in [(0.0, 3.0), (2.5, 11.0), (13.0, 20.0)] {
                let m = p.region_mass(a, b).unwrap();
                assert!(m.contains_value(trap(a, b) / z, 1e-6), "x={x} [{a},{b}] {m:?}");
            }
        }
    }

    #[test]
    fn masses_are_additive() {
        let xs = uniform_stream(&mut RandomStream::new(5, 0), 40);
        let p = CosinePosterior::new(cfg(), &xs).unwrap();
        let a = p.region_mass(0.0, 1.0).unwrap();
        let b = p.region_mass(1.0, 4.0).unwrap();
        let ab = p.region_mass(0.0, 4.0).unwrap();
        assert!(
            (a.midpoint() + b.midpoint() - ab.midpoint()).abs()
                <= a.abs_width() + b.abs_width() + ab.abs_width() + 1e-9
        );
        let u = p.intervals_mass(&[(0.0, 1.0), (1.0, 4.0)]).unwrap();
        assert!((u.midpoint() - ab.midpoint()).abs() < 1e-9);
    }

    #[test]
    fn tail_bracket_stays_narrow_for_exponential_prior() {
        let xs = uniform_stream(&mut RandomStream::new(6, 0), 200);
        let p = CosinePosterior::new(cfg(), &xs).unwrap();
        assert!(p.cap() > MIN_CAP);
        let m = p.hellinger_mass(0.3).unwrap();
        assert!(m.abs_width() < 2e-3, "{m:?}");
        let f = p.predictive_density(0.5).unwrap();
        assert!(f.lower_value() > 0.5 && f.upper_value() < 2.0);
    }
}
