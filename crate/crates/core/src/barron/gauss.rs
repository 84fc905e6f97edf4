//! The continuous half `F₀` with prior `Π₀(dθ) ∝ e^{−1/θ}` on `[0, 1]`.
//!
//! Everything is integrated in `u = √θ`, where the log-integrand
//! `−1/u² − nu² + √2·S·u + ln(2u)` is strictly concave and its single mode is
//! found by bisection on the derivative.

use std::f64::consts::SQRT_2;

use crate::barron::bracket::BracketedValue;
use crate::barron::stats::SufficientStats;
use crate::error::{Error, Result};
use crate::numerics::{integrate_log, LogWeight, QuadratureOptions, QuadratureResult};

/// `Z₀ = ∫₀¹ e^{−1/θ} dθ = E₂(1) = e⁻¹ − E₁(1)`.
pub const Z0: f64 = 0.148_495_506_775_922_05;

/// `ln π₀(θ) = −1/θ − ln Z₀`.
pub fn ln_theta_prior(theta: f64) -> f64 {
    -1.0 / theta - Z0.ln()
}

/// Data summary the continuous half depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussSummary {
    pub n: f64,
    pub s: f64,
}

impl GaussSummary {
    pub fn from_stats(stats: &SufficientStats) -> Self {
        GaussSummary {
            n: stats.n() as f64,
            s: stats.s_n(),
        }
    }

    pub fn prior() -> Self {
        GaussSummary { n: 0.0, s: 0.0 }
    }

    /// Unnormalized log posterior in `u = √θ`, including the Jacobian `2u`.
    #[inline]
    fn ln_integrand(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        -1.0 / (u * u) - self.n * u * u + SQRT_2 * self.s * u + (2.0 * u).ln()
    }

    fn d_ln_integrand(&self, u: f64) -> f64 {
        2.0 / (u * u * u) - 2.0 * self.n * u + SQRT_2 * self.s + 1.0 / u
    }

    /// Mode of the `u`-integrand on `(0, 1]`.
    fn mode(&self) -> f64 {
        if self.d_ln_integrand(1.0) >= 0.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (1e-3f64, 1.0f64);
        while self.d_ln_integrand(lo) <= 0.0 {
            lo *= 0.5;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.d_ln_integrand(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Breakpoints for `[a, b]`: the endpoints plus the mode and `±3σ`,
    /// `±6σ` from the local curvature, where they fall inside.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let u = self.mode();
        let curv = 6.0 / u.powi(4) + 2.0 * self.n + 1.0 / (u * u);
        let sigma = 1.0 / curv.sqrt();
        let mut pts = vec![a, b];
        for k in [-6.0, -3.0, 0.0, 3.0, 6.0] {
            let p = u + k * sigma;
            if p > a && p < b {
                pts.push(p);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `ln ∫_{u∈[a,b]} e^{g(u)} du` (unnormalized by `Z₀`).
    pub fn integrate_u(&self, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::Domain(format!("u-interval [{a}, {b}] is not inside [0, 1]")));
        }
        if a == b {
            return Ok(QuadratureResult::zero());
        }
        integrate_log(|u| self.ln_integrand(u), &self.breakpoints(a, b), opts)
    }
}

/// `(1/Z₀)∫₀¹ e^{−1/θ} e^{−nθ + √(2θ)S_n} dθ`, the marginal likelihood of the
/// continuous half relative to the uniform. Exactly 1 at `n = 0`.
pub fn gauss_marginal(stats: &SufficientStats, opts: QuadratureOptions) -> Result<QuadratureResult> {
    gauss_marginal_of(GaussSummary::from_stats(stats), opts)
}

pub fn gauss_marginal_of(g: GaussSummary, opts: QuadratureOptions) -> Result<QuadratureResult> {
    if g.n == 0.0 {
        return Ok(QuadratureResult {
            ln_estimate: LogWeight::ONE,
            ln_abs_error: LogWeight::ZERO,
            evaluations: 0,
        });
    }
    let q = g.integrate_u(0.0, 1.0, opts)?;
    Ok(QuadratureResult {
        ln_estimate: q.ln_estimate - Z0.ln(),
        ln_abs_error: q.ln_abs_error - Z0.ln(),
        evaluations: q.evaluations,
    })
}

/// Posterior on `θ` within `F₀`.
#[derive(Debug, Clone)]
pub struct ThetaPosterior {
    summary: GaussSummary,
    total: QuadratureResult,
    opts: QuadratureOptions,
}

impl ThetaPosterior {
    pub fn new(stats: &SufficientStats, opts: QuadratureOptions) -> Result<Self> {
        Self::from_summary(GaussSummary::from_stats(stats), opts)
    }

    pub fn from_summary(summary: GaussSummary, opts: QuadratureOptions) -> Result<Self> {
        let total = summary.integrate_u(0.0, 1.0, opts)?;
        Ok(ThetaPosterior { summary, total, opts })
    }

    pub fn summary(&self) -> GaussSummary {
        self.summary
    }

    /// Normalized posterior log-density in `θ`.
    pub fn ln_density(&self, theta: f64) -> f64 {
        if !(theta > 0.0 && theta <= 1.0) {
            return f64::NEG_INFINITY;
        }
        -1.0 / theta - self.summary.n * theta + (2.0 * theta).sqrt() * self.summary.s - self.total.ln_estimate.ln()
    }

    /// Posterior mass of `θ ∈ [a, b]`.
    pub fn interval_mass(&self, a: f64, b: f64) -> Result<BracketedValue> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::Domain(format!("θ-interval [{a}, {b}] is not inside [0, 1]")));
        }
        self.u_intervals_mass(&[(a.sqrt(), b.sqrt())])
    }

    /// Posterior mass of a union of disjoint `u = √θ` intervals.
    pub fn u_intervals_mass(&self, intervals: &[(f64, f64)]) -> Result<BracketedValue> {
        if intervals.len() == 1 && intervals[0] == (0.0, 1.0) {
            return Ok(BracketedValue::one());
        }
        let mut num = BracketedValue::zero();
        for &(a, b) in intervals {
            if b <= a {
                continue;
            }
            let q = self.summary.integrate_u(a, b, self.opts)?;
            num = num.add(&BracketedValue::from_quadrature(&q));
        }
        Ok(num.ratio_probability(&BracketedValue::from_quadrature(&self.total)))
    }
}

/// Prior mass of the KL ball `{θ < δ}` around the uniform, using
/// `KL(f₀, f_θ) = θ`.
pub fn prior_kl_ball_mass(delta: f64, opts: QuadratureOptions) -> Result<BracketedValue> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("KL radius must lie in (0, 1], got {delta}")));
    }
    ThetaPosterior::from_summary(GaussSummary::prior(), opts)?.interval_mass(0.0, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barron::stats::{update_stats, OccupancyStats};

    fn stats(xs: &[f64]) -> SufficientStats {
        let mut s = SufficientStats::new();
        let mut o = OccupancyStats::new();
        for &x in xs {
            update_stats(&mut s, &mut o, x).unwrap();
        }
        s
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for i in 1..panels {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn normalizer() {
        let z = simpson(|t| if t == 0.0 { 0.0 } else { (-1.0 / t).exp() }, 0.0, 1.0, 200_000);
        assert!((z - Z0).abs() < 1e-12);
        let q = GaussSummary::prior()
            .integrate_u(0.0, 1.0, QuadratureOptions::default())
            .unwrap();
        assert!((q.estimate() - Z0).abs() < 1e-10 * Z0);
        assert!((Z0 - 0.148496).abs() < 1e-6);
    }

    #[test]
    fn marginal_examples() {
        let opts = QuadratureOptions::default();
        assert_eq!(
            gauss_marginal(&SufficientStats::new(), opts).unwrap().ln_estimate.ln(),
            0.0
        );
        let m = gauss_marginal(&stats(&[0.5]), opts).unwrap();
        let oracle = simpson(|t| if t == 0.0 { 0.0 } else { (-1.0 / t - t).exp() }, 0.0, 1.0, 200_000) / Z0;
        assert!((m.estimate() - oracle).abs() < 1e-8 * oracle);
        // 40-digit reference value
        assert!((m.estimate() - 0.486_198_146_770_611_5).abs() < 1e-10);
    }

    #[test]
    fn marginal_at_n400_zero_mean() {
        // Laplace oracle in θ at the mode of −1/θ − nθ
        let n = 400.0;
        let g = GaussSummary { n, s: 0.0 };
        let m = gauss_marginal_of(g, QuadratureOptions::default())
            .unwrap()
            .ln_estimate
            .ln();
        let t = 1.0 / n.sqrt();
        let laplace = -2.0 * n.sqrt() + (2.0 * std::f64::consts::PI / (2.0 / t.powi(3))).sqrt().ln() - Z0.ln();
        assert!((m - laplace).abs() < 0.01, "{m} vs {laplace}");
        assert!(m >= -2.0 * n.sqrt() - n.ln() - 10.0 && m <= -2.0 * n.sqrt() + 10.0);
    }

    #[test]
    fn marginal_nonincreasing_along_zero_mean_extensions() {
        let opts = QuadratureOptions::default();
        let mut prev = 0.0;
        for n in 1..200 {
            let m = gauss_marginal_of(GaussSummary { n: n as f64, s: 0.0 }, opts)
                .unwrap()
                .ln_estimate
                .ln();
            assert!(m <= prev + 1e-12);
            prev = m;
        }
        // nonpositive increments of S
        let mut s = 3.0;
        let mut prev = gauss_marginal_of(GaussSummary { n: 10.0, s }, opts)
            .unwrap()
            .ln_estimate
            .ln();
        for n in 11..60 {
            s -= 0.1;
            let m = gauss_marginal_of(GaussSummary { n: n as f64, s }, opts)
                .unwrap()
                .ln_estimate
                .ln();
            assert!(m <= prev + 1e-12);
            prev = m;
        }
    }

    #[test]
    fn theta_posterior_masses() {
        let opts = QuadratureOptions::default();
        let p = ThetaPosterior::new(&SufficientStats::new(), opts).unwrap();
        assert_eq!(p.interval_mass(0.0, 1.0).unwrap(), BracketedValue::one());
        let a = p.interval_mass(0.0, 0.3).unwrap();
        let b = p.interval_mass(0.3, 1.0).unwrap();
        assert!((a.midpoint() + b.midpoint() - 1.0).abs() < 1e-9);
        // the density integrates to one in θ
        let s = stats(&[0.2, 0.9, 0.95, 0.6]);
        let p = ThetaPosterior::new(&s, opts).unwrap();
        let mass = simpson(|t| p.ln_density(t).exp(), 0.0, 1.0, 100_000);
        assert!((mass - 1.0).abs() < 1e-9);
        let m = p.interval_mass(0.25, 0.5).unwrap();
        let direct = simpson(|t| p.ln_density(t).exp(), 0.25, 0.5, 10_000);
        assert!(m.contains_value(direct, 1e-10));
    }

    #[test]
    fn kl_ball_prior_mass() {
        let opts = QuadratureOptions::default();
        assert_eq!(prior_kl_ball_mass(1.0, opts).unwrap(), BracketedValue::one());
        let m = prior_kl_ball_mass(0.1, opts).unwrap();
        // δ·E₂(1/δ)/Z₀ by composite Simpson in θ
        let oracle = simpson(|t| if t == 0.0 { 0.0 } else { (-1.0 / t).exp() }, 0.0, 0.1, 200_000) / Z0;
        assert!(m.contains_value(oracle, 1e-15));
        // 40-digit reference value of δ·E₂(1/δ)/E₂(1)
        assert!(
            (m.midpoint() - 2.579_364_553_710_973e-6).abs() < 1e-15,
            "{:e}",
            m.midpoint()
        );
        for delta in [1e-3, 0.01, 0.05] {
            assert!(!prior_kl_ball_mass(delta, opts).unwrap().lower.is_zero());
        }
        assert!(prior_kl_ball_mass(0.0, opts).is_err());
    }
}
