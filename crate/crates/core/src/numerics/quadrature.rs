//! Globally adaptive Simpson quadrature of nonnegative integrands given in
//! log-space.
//!
//! Each panel carries a 3-point and a 5-point Simpson estimate; the panel
//! error bound is `|S₂ − S₁|` (the unscaled difference, fifteen times the
//! usual asymptotic estimate) and the panel with the largest bound is
//! bisected next. Every seed interval starts as four panels. All sums are formed in log-space, so integrands of magnitude
//! `e^{±10⁴}` are handled without overflow. The refinement sequence does not
//! depend on the tolerance, which only decides when to stop: a tighter
//! tolerance continues the same sequence further.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::numerics::{log_sum_exp, LogWeight};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Stop when `abs_error_bound ≤ rel_tol · estimate`.
    pub rel_tol: f64,
    /// Integrand evaluation budget.
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-10,
            max_evaluations: 400_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Estimate and error bound, both held as logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub ln_estimate: LogWeight,
    pub ln_abs_error: LogWeight,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn estimate(&self) -> f64 {
        self.ln_estimate.value()
    }

    pub fn abs_error_bound(&self) -> f64 {
        self.ln_abs_error.value()
    }

    /// `[estimate − error, estimate + error]` in log-space, clamped at 0.
    pub fn bracket(&self) -> (LogWeight, LogWeight) {
        let hi = self.ln_estimate.ln_add(self.ln_abs_error);
        let lo = self.ln_estimate.ln_sub(self.ln_abs_error).unwrap_or(LogWeight::ZERO);
        (lo, hi)
    }

    /// Relative error `error / estimate` (0 for an exactly-zero integral).
    pub fn rel_error(&self) -> f64 {
        if self.ln_estimate.is_zero() {
            if self.ln_abs_error.is_zero() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.ln_abs_error.ln() - self.ln_estimate.ln()).exp()
        }
    }

    pub fn zero() -> Self {
        QuadratureResult {
            ln_estimate: LogWeight::ZERO,
            ln_abs_error: LogWeight::ZERO,
            evaluations: 0,
        }
    }
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    // ln f at a, a+h/4, a+h/2, a+3h/4, b
    f: [f64; 5],
    fine: f64,
    err: f64,
    seq: u64,
}

impl Panel {
    fn new(a: f64, b: f64, f: [f64; 5], seq: u64) -> Panel {
        let h = b - a;
        let coarse = simpson_ln(h, f[0], f[2], f[4]);
        let left = simpson_ln(0.5 * h, f[0], f[1], f[2]);
        let right = simpson_ln(0.5 * h, f[2], f[3], f[4]);
        let fine = LogWeight::from_ln(left).ln_add(LogWeight::from_ln(right)).ln();
        let err = ln_abs_diff(fine, coarse);
        Panel {
            a,
            b,
            f,
            fine,
            err,
            seq,
        }
    }

    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.a + self.b);
        let q1 = 0.5 * (self.a + mid);
        let q3 = 0.5 * (mid + self.b);
        self.a < q1 && q1 < mid && mid < q3 && q3 < self.b
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

#[inline]
fn simpson_ln(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    let s = log_sum_exp([
        LogWeight::from_ln(fa),
        LogWeight::from_ln(fm + 4f64.ln()),
        LogWeight::from_ln(fb),
    ]);
    if s.is_zero() {
        f64::NEG_INFINITY
    } else {
        s.ln() + (h / 6.0).ln()
    }
}

/// `ln |e^x − e^y|`.
#[inline]
fn ln_abs_diff(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    LogWeight::from_ln(hi)
        .ln_sub(LogWeight::from_ln(lo))
        .map_or(f64::NEG_INFINITY, |w| w.ln())
}

const INITIAL_SPLIT: usize = 4;

struct Evaluator<'f, F> {
    f: &'f F,
    count: usize,
}

impl<F: Fn(f64) -> f64> Evaluator<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.count += 1;
        let v = (self.f)(x);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::Domain(format!("log-integrand returned {v} at x = {x}")));
        }
        Ok(v)
    }
}

/// Integrates `exp(ln_f)` over `[breakpoints[0], breakpoints[last]]`.
///
/// `breakpoints` must be sorted; each consecutive pair seeds one initial
/// panel (put discontinuities, kinks and the location of a sharp peak here).
/// Duplicate points are skipped.
pub fn integrate_log<F>(ln_f: F, breakpoints: &[f64], opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    let mut pts: Vec<f64> = Vec::with_capacity(breakpoints.len());
    for &p in breakpoints {
        if !p.is_finite() {
            return Err(Error::Domain(format!("non-finite breakpoint {p}")));
        }
        if let Some(&last) = pts.last() {
            if p < last {
                return Err(Error::Domain("breakpoints must be sorted".into()));
            }
            if p == last {
                continue;
            }
        }
        pts.push(p);
    }
    if pts.len() < 2 {
        return Err(Error::Domain("integration needs an interval with a < b".into()));
    }

    let mut ev = Evaluator { f: &ln_f, count: 0 };
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut seeds = Vec::with_capacity(4 * pts.len());
    for w in pts.windows(2) {
        let h = w[1] - w[0];
        seeds.push(w[0]);
        for j in 1..INITIAL_SPLIT {
            let x = w[0] + h * j as f64 / INITIAL_SPLIT as f64;
            if x > *seeds.last().unwrap() && x < w[1] {
                seeds.push(x);
            }
        }
    }
    seeds.push(*pts.last().unwrap());
    let mut f_left = ev.eval(seeds[0])?;
    for w in seeds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        let f_right = ev.eval(b)?;
        let f = [
            f_left,
            ev.eval(a + 0.25 * h)?,
            ev.eval(a + 0.5 * h)?,
            ev.eval(a + 0.75 * h)?,
            f_right,
        ];
        f_left = f_right;
        let p = Panel::new(a, b, f, seq);
        seq += 1;
        if p.splittable() {
            heap.push(p);
        } else {
            frozen.push(p);
        }
    }

    let ln_tol = opts.rel_tol.ln();
    let mut totals = Totals::from_panels(heap.iter().chain(frozen.iter()));
    loop {
        if totals.maybe_converged(ln_tol) {
            totals = Totals::from_panels(heap.iter().chain(frozen.iter()));
            if totals.maybe_converged(ln_tol) {
                return Ok(totals.result(ev.count));
            }
        }
        if ev.count >= opts.max_evaluations {
            let t = Totals::from_panels(heap.iter().chain(frozen.iter()));
            let r = t.result(ev.count);
            return Err(Error::QuadratureNotConverged {
                estimate: r.estimate(),
                abs_error: r.abs_error_bound(),
                evaluations: ev.count,
            });
        }
        let Some(worst) = heap.pop() else {
            let r = Totals::from_panels(frozen.iter()).result(ev.count);
            return Err(Error::QuadratureNotConverged {
                estimate: r.estimate(),
                abs_error: r.abs_error_bound(),
                evaluations: ev.count,
            });
        };
        let (a, b) = (worst.a, worst.b);
        let mid = 0.5 * (a + b);
        let hl = mid - a;
        let hr = b - mid;
        let left = Panel::new(
            a,
            mid,
            [
                worst.f[0],
                ev.eval(a + 0.25 * hl)?,
                worst.f[1],
                ev.eval(a + 0.75 * hl)?,
                worst.f[2],
            ],
            seq,
        );
        let right = Panel::new(
            mid,
            b,
            [
                worst.f[2],
                ev.eval(mid + 0.25 * hr)?,
                worst.f[3],
                ev.eval(mid + 0.75 * hr)?,
                worst.f[4],
            ],
            seq + 1,
        );
        seq += 2;
        totals.remove(&worst);
        for child in [left, right] {
            totals.add(&child);
            if child.splittable() {
                heap.push(child);
            } else {
                frozen.push(child);
            }
        }
        if totals.needs_rebase() {
            totals = Totals::from_panels(heap.iter().chain(frozen.iter()));
        }
    }
}

/// Running linear sums relative to a fixed log shift; recomputed exactly
/// before any convergence decision.
struct Totals {
    shift: f64,
    est: f64,
    err: f64,
    rebase: bool,
}

impl Totals {
    fn from_panels<'p>(panels: impl Iterator<Item = &'p Panel>) -> Totals {
        let mut est = crate::numerics::LogSumExp::new();
        let mut err = crate::numerics::LogSumExp::new();
        for p in panels {
            est.push(LogWeight::from_ln(p.fine));
            err.push(LogWeight::from_ln(p.err));
        }
        let e = est.total().ln();
        let r = err.total().ln();
        let shift = if e.is_finite() {
            e
        } else if r.is_finite() {
            r
        } else {
            0.0
        };
        Totals {
            shift,
            est: (e - shift).exp(),
            err: (r - shift).exp(),
            rebase: false,
        }
    }

    fn add(&mut self, p: &Panel) {
        if p.fine > self.shift + 600.0 || p.err > self.shift + 600.0 {
            self.rebase = true;
        }
        self.est += (p.fine - self.shift).exp();
        self.err += (p.err - self.shift).exp();
    }

    fn remove(&mut self, p: &Panel) {
        self.est -= (p.fine - self.shift).exp();
        self.err -= (p.err - self.shift).exp();
        if self.est < 0.0 {
            self.est = 0.0;
        }
        if self.err < 0.0 {
            self.err = 0.0;
        }
    }

    fn needs_rebase(&self) -> bool {
        self.rebase || !(self.est.is_finite() && self.err.is_finite())
    }

    fn maybe_converged(&self, ln_tol: f64) -> bool {
        if self.err == 0.0 {
            return true;
        }
        if self.est == 0.0 {
            return false;
        }
        self.err.ln() <= ln_tol + self.est.ln()
    }

    fn result(&self, evaluations: usize) -> QuadratureResult {
        let ln_or_zero = |v: f64| {
            if v > 0.0 {
                LogWeight::from_ln(v.ln() + self.shift)
            } else {
                LogWeight::ZERO
            }
        };
        QuadratureResult {
            ln_estimate: ln_or_zero(self.est),
            ln_abs_error: ln_or_zero(self.err),
            evaluations,
        }
    }
}

/// Convenience wrapper for a nonnegative integrand given in linear scale.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_log(
        |x| {
            let v = f(x);
            if v < 0.0 {
                f64::NAN
            } else {
                v.ln()
            }
        },
        &[a, b],
        opts,
    )
}
