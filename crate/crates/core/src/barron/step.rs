//! Sums over the step families `F_N`.
//!
//! A level-`N` member survives the data iff every occupied cell is selected.
//! With `k = k_N` occupied cells the fraction of survivors is
//! `C(2N²−k, N²−k)/C(2N², N²) = (N²)_k/(2N²)_k =: r_N(k)`, and each survivor
//! has likelihood `2ⁿ`. The level sum is truncated at `M ≥ N_distinct`; above
//! it `k_N = d` (distinct points) and the tail is bracketed analytically using
//! that `r_N(d)` increases in `N` towards `2^{−d}`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::barron::bracket::{BracketedValue, COMBINE_SLACK};
use crate::barron::stats::{OccupancyStats, SufficientStats};
use crate::density::cell_index_unchecked;
use crate::error::{Error, Result};
use crate::numerics::special::trigamma_bounds;
use crate::numerics::{log_falling_factorial_ratio, LogSumExp, LogWeight};

/// Per-term log error allowance once the Stirling route of the falling
/// factorial ratio is in play (k above 64).
const STIRLING_LN_SLACK: f64 = 1e-10;

/// `ln(6/π²)`.
pub fn ln_six_over_pi2() -> f64 {
    (6.0 / (PI * PI)).ln()
}

/// `ln(6/(π²N²))`, the prior weight of level `N` inside the step half.
pub fn ln_level_weight(level: u64) -> f64 {
    ln_six_over_pi2() - 2.0 * (level as f64).ln()
}

/// How far the level sum is carried explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationPolicy {
    /// `M ≥ per_observation · n`.
    pub per_observation: u64,
    /// `M ≥ floor`.
    pub floor: u64,
    /// Fixed `M`, overriding the two rules above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<u64>,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            per_observation: 4,
            floor: 64,
            fixed: None,
        }
    }
}

impl TruncationPolicy {
    pub fn fixed(m: u64) -> Self {
        TruncationPolicy {
            fixed: Some(m),
            ..Default::default()
        }
    }

    /// `M = max(N_distinct, per_observation·n, floor)`, or the fixed value.
    pub fn level(&self, n: u64, occ: &OccupancyStats) -> Result<u64> {
        let required = occ.distinct_level();
        match self.fixed {
            Some(m) if m < required => Err(Error::TruncationTooLow { m, required }),
            Some(m) => Ok(m),
            None => Ok(required
                .max(self.per_observation.saturating_mul(n))
                .max(self.floor)
                .max(1)),
        }
    }
}

/// `ln[(6/π²N²) · 2ⁿ · r_N(k)]`, or without the `2ⁿ` factor.
pub fn log_step_term(level: u64, k: u64, n: u64, with_likelihood: bool) -> Result<LogWeight> {
    if level == 0 {
        return Err(Error::Domain("level N must be positive".into()));
    }
    if k > n {
        return Err(Error::Precondition(format!(
            "occupancy k={k} exceeds sample size n={n}"
        )));
    }
    let half = level * level;
    if k > 2 * half {
        return Err(Error::Precondition(format!(
            "occupancy k={k} exceeds the {} cells of level {level}",
            2 * half
        )));
    }
    let r = log_falling_factorial_ratio(half, 2 * half, k)?;
    let lik = if with_likelihood { n as f64 * LN_2 } else { 0.0 };
    Ok(r + (ln_level_weight(level) + lik))
}

/// Result of the truncated level sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMarginal {
    /// Certified bracket on the full sum over all `N`.
    pub value: BracketedValue,
    /// Exact part `Σ_{N ≤ M}`.
    pub head: BracketedValue,
    /// Bracket on `Σ_{N > M}`.
    pub tail: BracketedValue,
    pub truncation: u64,
}

/// `Σ_N (6/π²N²) [2ⁿ] r_N(k_N)`, the step-half marginal likelihood (or the
/// prior mass of data-consistent step densities without the likelihood).
pub fn step_marginal(
    occ: &OccupancyStats,
    n: u64,
    with_likelihood: bool,
    trunc: &TruncationPolicy,
) -> Result<StepMarginal> {
    let m = trunc.level(n, occ)?;
    step_marginal_at(occ, n, with_likelihood, m)
}

/// [`step_marginal`] at an explicit truncation level `M ≥ N_distinct`.
pub fn step_marginal_at(occ: &OccupancyStats, n: u64, with_likelihood: bool, m: u64) -> Result<StepMarginal> {
    let required = occ.distinct_level();
    if m < required {
        return Err(Error::TruncationTooLow { m, required });
    }
    check_occupancy(occ, n)?;
    let mut acc = LogSumExp::new();
    let mut k_max = 0;
    for level in 1..=m {
        let k = occ.k(level);
        if k > level * level {
            continue;
        }
        k_max = k_max.max(k);
        acc.push(log_step_term(level, k, n, with_likelihood)?);
    }
    let head = BracketedValue::exact(acc.total()).widen(head_slack(m, k_max));
    let tail = tail_bracket(occ.distinct(), n, with_likelihood, m)?;
    Ok(StepMarginal {
        value: head.add(&tail),
        head,
        tail,
        truncation: m,
    })
}

/// Exact sum of the terms for the given levels only (no tail).
pub fn step_partial_sum(
    occ: &OccupancyStats,
    n: u64,
    with_likelihood: bool,
    levels: impl IntoIterator<Item = u64>,
) -> Result<LogWeight> {
    check_occupancy(occ, n)?;
    let mut acc = LogSumExp::new();
    for level in levels {
        let k = occ.k(level);
        if k <= level * level {
            acc.push(log_step_term(level, k, n, with_likelihood)?);
        }
    }
    Ok(acc.total())
}

fn check_occupancy(occ: &OccupancyStats, n: u64) -> Result<()> {
    if occ.distinct() > n {
        return Err(Error::Precondition(format!(
            "occupancy has {} distinct points but n = {n}",
            occ.distinct()
        )));
    }
    Ok(())
}

/// Rounding allowance for an `m`-term log-sum of falling-factorial ratios
/// with occupancy up to `k_max`.
fn head_slack(m: u64, k_max: u64) -> f64 {
    let eps = f64::EPSILON;
    let per_term = if k_max > 64 {
        STIRLING_LN_SLACK
    } else {
        4.0 * eps * k_max as f64
    };
    COMBINE_SLACK + 4.0 * eps * m as f64 + per_term
}

/// Bracket on `Σ_{N > M} (6/π²N²) [2ⁿ] r_N(d)`.
///
/// Lower: `r_N(d) ≥ r_{M+1}(d)` and `Σ_{N>M} N⁻² ≥ ψ₁(M+1)` from below.
/// Upper: `r_N(d) ≤ 2^{−d} exp(−d(d−1)/(4N²))`, summed either against the
/// trigamma bound or, where `N⁻² e^{−c/N²}` decreases, against
/// `∫_M^∞ t⁻² e^{−c/t²} dt = (√π/(2√c)) erf(√c/M)`.
pub fn tail_bracket(d: u64, n: u64, with_likelihood: bool, m: u64) -> Result<BracketedValue> {
    let lik = if with_likelihood { n as f64 * LN_2 } else { 0.0 };
    let lw = ln_six_over_pi2() + lik;
    let next = m + 1;
    let half = next * next;
    let r_next = if d > half {
        LogWeight::ZERO
    } else {
        log_falling_factorial_ratio(half, 2 * half, d)?
    };
    let (psi_lo, psi_hi) = trigamma_bounds(next as f64);
    let lower = r_next + (lw + psi_lo.ln());

    let c = (d as f64) * (d.saturating_sub(1) as f64) / 4.0;
    let mut ln_sum = psi_hi.ln();
    let mf = m as f64;
    if c > 0.0 && mf * mf >= c {
        let rc = c.sqrt();
        let integral = (PI.sqrt() / (2.0 * rc)) * libm::erf(rc / mf);
        ln_sum = ln_sum.min(integral.ln());
    }
    let upper = LogWeight::from_ln(lw - d as f64 * LN_2 + ln_sum);
    let slack = COMBINE_SLACK
        + if d > 64 {
            STIRLING_LN_SLACK
        } else {
            4.0 * f64::EPSILON * d as f64
        };
    Ok(BracketedValue::new(lower.min(upper), upper).widen(slack))
}

/// Posterior over the level `N` within the step half.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPosterior {
    /// `(N, bracketed posterior weight)` for `N ≤ M`.
    pub levels: Vec<(u64, BracketedValue)>,
    /// Posterior mass of all levels above `M`.
    pub tail: BracketedValue,
    /// Posterior mean of `1/N`.
    pub mean_inverse_level: BracketedValue,
    pub truncation: u64,
}

/// Per-level posterior weights within `F_△`.
pub fn posterior_over_levels(occ: &OccupancyStats, n: u64, trunc: &TruncationPolicy) -> Result<LevelPosterior> {
    let m = trunc.level(n, occ)?;
    let total = step_marginal_at(occ, n, true, m)?;
    let mut levels = Vec::with_capacity(m as usize);
    let mut inv = LogSumExp::new();
    for level in 1..=m {
        let k = occ.k(level);
        let term = if k > level * level {
            LogWeight::ZERO
        } else {
            log_step_term(level, k, n, true)?
        };
        inv.push(term - (level as f64).ln());
        levels.push((level, BracketedValue::exact(term).ratio_probability(&total.value)));
    }
    let inv_head = BracketedValue::exact(inv.total()).widen(head_slack(m, n));
    let inv_tail = BracketedValue::new(LogWeight::ZERO, total.tail.upper - ((m + 1) as f64).ln());
    let mean_inverse_level = inv_head.add(&inv_tail).ratio_probability(&total.value);
    Ok(LevelPosterior {
        levels,
        tail: total.tail.ratio_probability(&total.value),
        mean_inverse_level,
        truncation: m,
    })
}

/// Prior mean of `1/N` under the level weights: `(6/π²) ζ(3)`.
pub fn prior_mean_inverse_level() -> f64 {
    const ZETA3: f64 = 1.202_056_903_159_594_3;
    6.0 / (PI * PI) * ZETA3
}

/// Posterior predictive density of the step half. At level `N` the cell of
/// `x` is selected with posterior probability 1 if occupied and
/// `(N²−k_N)/(2N²−k_N)` otherwise; the predictive is twice that, mixed over
/// the level posterior.
#[derive(Debug, Clone)]
pub struct StepPredictive<'a> {
    stats: &'a SufficientStats,
    occ: &'a OccupancyStats,
    n: u64,
    m: u64,
    /// `(ln term_N, k_N)` for `N ≤ M`.
    terms: Vec<(LogWeight, u64)>,
    k_max: u64,
}

/// How far past `M` the predictive resolves whether `x` shares a cell with
/// a data point before falling back to a coarse bound.
const PREDICTIVE_EXTRA_LEVELS: u64 = 1 << 16;

impl<'a> StepPredictive<'a> {
    pub fn new(stats: &'a SufficientStats, occ: &'a OccupancyStats, trunc: &TruncationPolicy) -> Result<Self> {
        let n = stats.n();
        let m = trunc.level(n, occ)?;
        check_occupancy(occ, n)?;
        let mut terms = Vec::with_capacity(m as usize);
        let mut k_max = 0;
        for level in 1..=m {
            let k = occ.k(level);
            let t = if k > level * level {
                LogWeight::ZERO
            } else {
                k_max = k_max.max(k);
                log_step_term(level, k, n, true)?
            };
            terms.push((t, k));
        }
        Ok(StepPredictive {
            stats,
            occ,
            n,
            m,
            terms,
            k_max,
        })
    }

    fn level_value(level: u64, k: u64, occupied: bool) -> f64 {
        if occupied {
            2.0
        } else {
            let h = (level * level) as f64;
            2.0 * (h - k as f64) / (2.0 * h - k as f64)
        }
    }

    /// Bracketed predictive density at `x ∈ [0, 1)`.
    pub fn density(&self, x: f64) -> Result<BracketedValue> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("predictive needs x in [0, 1), got {x}")));
        }
        let (pred, present, succ) = self.stats.neighbours(x);
        let occupied = |level: u64| {
            if present {
                return true;
            }
            let c = cell_index_unchecked(x, level);
            pred.is_some_and(|p| cell_index_unchecked(p, level) == c)
                || succ.is_some_and(|q| cell_index_unchecked(q, level) == c)
        };
        let mut num = LogSumExp::new();
        let mut den = LogSumExp::new();
        for (i, &(t, k)) in self.terms.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let level = i as u64 + 1;
            den.push(t);
            num.push(t + Self::level_value(level, k, occupied(level)).ln());
        }
        // beyond M, k_N = d; x shares a cell with a neighbour only while the
        // cell width exceeds the distance to it
        let d = self.occ.distinct();
        let gap = [pred.map(|p| x - p), succ.map(|q| q - x)]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        let resolve_to = if present {
            self.m
        } else {
            crate::barron::stats::distinct_level(gap)
                .max(self.m)
                .min(self.m + PREDICTIVE_EXTRA_LEVELS)
        };
        let mut k_max = self.k_max;
        for level in (self.m + 1)..=resolve_to {
            if d > level * level {
                continue;
            }
            k_max = k_max.max(d);
            let t = log_step_term(level, d, self.n, true)?;
            den.push(t);
            num.push(t + Self::level_value(level, d, occupied(level)).ln());
        }
        let slack = head_slack(resolve_to, k_max);
        let head_num = num.total();
        let head_den = den.total();
        let tail = tail_bracket(d, self.n, true, resolve_to)?;
        let next = resolve_to + 1;
        let (v_lo, v_hi) = if present {
            (2.0, 2.0)
        } else {
            let fully_resolved = crate::barron::stats::distinct_level(gap) <= resolve_to;
            let v_lo = if d > next * next {
                0.0
            } else {
                Self::level_value(next, d, false)
            };
            (v_lo, if fully_resolved { 1.0 } else { 2.0 })
        };
        // (H_P + τ v)/(H + τ) is monotone in τ, so the extremes sit at the
        // tail bracket's endpoints
        let ratio = |tau: LogWeight, v: f64| -> f64 {
            let top = head_num.ln_add(tau + v.ln());
            let bottom = head_den.ln_add(tau);
            if bottom.is_zero() {
                return f64::NAN;
            }
            (top.ln() - bottom.ln()).exp()
        };
        let lo = ratio(tail.lower, v_lo).min(ratio(tail.upper, v_lo));
        let hi = ratio(tail.lower, v_hi).max(ratio(tail.upper, v_hi));
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::UndefinedPosterior);
        }
        Ok(
            BracketedValue::new(LogWeight::from_value(lo), LogWeight::from_value(hi))
                .widen(2.0 * slack + COMBINE_SLACK),
        )
    }

    /// Kolmogorov distance between the predictive and the uniform on a
    /// `grid`-point midpoint grid: `max_j |F(j/grid) − j/grid|`, with `F`
    /// accumulated from the bracket midpoints.
    pub fn ks_to_uniform(&self, grid: usize) -> Result<f64> {
        let h = 1.0 / grid as f64;
        let mut cdf = 0.0;
        let mut dist: f64 = 0.0;
        for j in 0..grid {
            let x = (j as f64 + 0.5) * h;
            cdf += self.density(x)?.midpoint() * h;
            dist = dist.max((cdf - (j + 1) as f64 * h).abs());
        }
        Ok(dist)
    }
}

/// Bracketed predictive density of the step half at `x_next`.
pub fn step_predictive_density(
    stats: &SufficientStats,
    occ: &OccupancyStats,
    trunc: &TruncationPolicy,
    x_next: f64,
) -> Result<BracketedValue> {
    StepPredictive::new(stats, occ, trunc)?.density(x_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barron::stats::update_stats;
    use crate::numerics::{uniform_stream, RandomStream};

    fn build(xs: &[f64]) -> (SufficientStats, OccupancyStats) {
        let mut s = SufficientStats::new();
        let mut o = OccupancyStats::new();
        for &x in xs {
            update_stats(&mut s, &mut o, x).unwrap();
        }
        (s, o)
    }

    #[test]
    fn term_examples() {
        let t = log_step_term(2, 3, 3, true).unwrap();
        // (6/π²)/4 · 8 · (4·3·2)/(8·7·6)
        let direct = 6.0 / (PI * PI) / 4.0 * 8.0 * 24.0 / 336.0;
        assert!((t.ln() - direct.ln()).abs() < 1e-14);
        assert!((t.value() - 0.086847).abs() < 1e-6);
        assert!(log_step_term(1, 2, 2, true).unwrap().is_zero());
        let t = log_step_term(1, 1, 1, false).unwrap();
        assert!((t.value() - 0.303964).abs() < 1e-6);
        assert!((t.ln() - (3.0 / (PI * PI)).ln()).abs() < 1e-15);
        assert!(matches!(log_step_term(3, 4, 3, true), Err(Error::Precondition(_))));
    }

    #[test]
    fn ratio_increases_with_level() {
        for d in [1u64, 2, 5, 30, 100, 700] {
            let mut prev = f64::NEG_INFINITY;
            for level in 1..400u64 {
                if d > level * level {
                    continue;
                }
                let r = log_falling_factorial_ratio(level * level, 2 * level * level, d)
                    .unwrap()
                    .ln();
                assert!(r >= prev - 1e-12, "d={d} N={level}");
                assert!(r <= -(d as f64) * LN_2 + 1e-12);
                prev = r;
            }
        }
    }

    #[test]
    fn prior_b1_mass() {
        let (_, o) = build(&[0.37]);
        let sm = step_marginal(&o, 1, false, &TruncationPolicy::default()).unwrap();
        // half the level weight survives at every level
        assert!(sm.value.contains_value(0.5, 0.0));
        assert!(sm.value.rel_width() < 1e-12, "{:?}", sm.value);
        // total step prior mass
        let empty = OccupancyStats::new();
        let sm = step_marginal(&empty, 0, false, &TruncationPolicy::default()).unwrap();
        assert!(sm.value.contains_value(1.0, 0.0));
        assert!(sm.value.abs_width() < 1e-12);
    }

    #[test]
    fn small_bracket_for_three_points() {
        let (_, o) = build(&[0.1, 0.3, 0.7]);
        let a = step_marginal_at(&o, 3, true, 50).unwrap();
        let b = step_marginal_at(&o, 3, true, 500).unwrap();
        assert!(a.value.rel_width() <= 1e-3, "{}", a.value.rel_width());
        assert!(b.value.is_subset_of(&a.value));
        assert!(b.value.rel_width() < a.value.rel_width());
    }

    #[test]
    fn refuses_truncation_below_distinct_level() {
        let (_, o) = build(&[0.1, 0.1001]);
        assert!(o.distinct_level() > 10);
        assert!(matches!(
            step_marginal_at(&o, 2, true, 10),
            Err(Error::TruncationTooLow { .. })
        ));
        assert!(matches!(
            step_marginal(&o, 2, true, &TruncationPolicy::fixed(5)),
            Err(Error::TruncationTooLow { .. })
        ));
    }

    #[test]
    fn brackets_nest_on_random_instances() {
        let mut rs = RandomStream::new(2024, 0);
        for _ in 0..100 {
            let n = 1 + rs.next_below(12) as usize;
            let xs: Vec<f64> = uniform_stream(&mut rs, n).into_iter().filter(|&x| x > 0.0).collect();
            let (s, o) = build(&xs);
            let m0 = o.distinct_level().max(50);
            let a = step_marginal_at(&o, s.n(), true, m0).unwrap();
            let b = step_marginal_at(&o, s.n(), true, m0.max(500)).unwrap();
            let mid = LogWeight::from_value(b.value.midpoint());
            assert!(a.value.contains(mid), "{:?} vs {:?}", b.value, a.value);
            // nested up to the rounding allowance, which grows with M
            assert!(b.value.is_subset_of(&a.value.widen(1e-12)));
        }
    }

    #[test]
    fn level_posterior_examples() {
        let trunc = TruncationPolicy::default();
        let lp = posterior_over_levels(&OccupancyStats::new(), 0, &trunc).unwrap();
        for &(level, w) in lp.levels.iter().take(20) {
            let prior = 6.0 / (PI * PI * (level * level) as f64);
            assert!(w.contains_value(prior, 1e-15), "N={level}");
        }
        let (_, o) = build(&[0.42]);
        let lp1 = posterior_over_levels(&o, 1, &trunc).unwrap();
        for (&(_, a), &(_, b)) in lp.levels.iter().zip(&lp1.levels).take(20) {
            assert!((a.midpoint() - b.midpoint()).abs() < 1e-12);
        }
        assert!(lp.mean_inverse_level.contains_value(prior_mean_inverse_level(), 1e-12));
    }

    #[test]
    fn predictive_is_uniform_a_priori() {
        let s = SufficientStats::new();
        let o = OccupancyStats::new();
        let p = StepPredictive::new(&s, &o, &TruncationPolicy::default()).unwrap();
        for j in 0..1024 {
            let v = p.density(j as f64 / 1024.0).unwrap();
            assert!(v.contains_value(1.0, 0.0));
            assert!(v.abs_width() < 1e-9);
        }
        assert!(p.ks_to_uniform(1024).unwrap() < 1e-12);
    }

    #[test]
    fn predictive_restricted_to_level_one() {
        // the only level-1 density consistent with a point in [0, ½) selects cell 0
        let (s, o) = build(&[0.3]);
        let p = StepPredictive::new(&s, &o, &TruncationPolicy::default()).unwrap();
        assert_eq!(StepPredictive::level_value(1, o.k(1), true), 2.0);
        assert_eq!(StepPredictive::level_value(1, o.k(1), false), 0.0);
        // integrates to one
        let grid = 4096;
        let mass: f64 = (0..grid)
            .map(|j| p.density((j as f64 + 0.5) / grid as f64).unwrap().midpoint())
            .sum::<f64>()
            / grid as f64;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
        // at a data point the predictive exceeds the uniform
        assert!(p.density(0.3).unwrap().lower_value() > 1.0);
    }
}
