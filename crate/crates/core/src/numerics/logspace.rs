//! Log-space arithmetic.
//!
//! Every likelihood, prior mass and marginal in this crate is carried as a
//! natural logarithm. `f64::NEG_INFINITY` is the representation of `log(0)`;
//! it is a legitimate value (step densities assign zero likelihood to most
//! datasets), never an error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Natural logarithm of a nonnegative real.
#[derive(Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogWeight(f64);

impl LogWeight {
    /// `log(0)`.
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    /// `log(1)`.
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wraps a log value. NaN is rejected by a debug assertion; callers never
    /// produce it from valid inputs.
    #[inline]
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "NaN log-weight");
        debug_assert!(ln != f64::INFINITY, "+inf log-weight");
        LogWeight(ln)
    }

    /// Log of a nonnegative linear value.
    #[inline]
    pub fn from_value(v: f64) -> Self {
        debug_assert!(v >= 0.0, "negative weight {v}");
        LogWeight(v.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `log(e^a + e^b)`.
    #[inline]
    pub fn ln_add(self, other: LogWeight) -> LogWeight {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogWeight(hi);
        }
        LogWeight(hi + (lo - hi).exp().ln_1p())
    }

    /// `log(e^a - e^b)`, defined only for `b <= a`.
    pub fn ln_sub(self, other: LogWeight) -> Option<LogWeight> {
        if other.0 > self.0 {
            return None;
        }
        if other.0 == f64::NEG_INFINITY {
            return Some(self);
        }
        if other.0 == self.0 {
            return Some(LogWeight::ZERO);
        }
        Some(LogWeight(self.0 + ln_one_minus_exp(other.0 - self.0)))
    }

    /// Raise to a real power (multiply the log).
    #[inline]
    pub fn powf(self, p: f64) -> LogWeight {
        if self.is_zero() {
            if p > 0.0 {
                return LogWeight::ZERO;
            }
            if p == 0.0 {
                return LogWeight::ONE;
            }
        }
        LogWeight(self.0 * p)
    }

    /// `log(1 - e^a)` for a probability `e^a`; `None` if `a > 0`.
    pub fn complement(self) -> Option<LogWeight> {
        if self.0 > 0.0 {
            return None;
        }
        Some(LogWeight(ln_one_minus_exp(self.0)))
    }

    /// Moves the value outward (down) by an absolute log slack.
    #[inline]
    pub fn nudge_down(self, slack: f64) -> LogWeight {
        if self.is_zero() {
            self
        } else {
            LogWeight(self.0 - slack)
        }
    }

    /// Moves the value outward (up) by an absolute log slack.
    #[inline]
    pub fn nudge_up(self, slack: f64) -> LogWeight {
        if self.is_zero() {
            self
        } else {
            LogWeight(self.0 + slack)
        }
    }

    pub fn max(self, other: LogWeight) -> LogWeight {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: LogWeight) -> LogWeight {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    pub fn total_cmp(&self, other: &LogWeight) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `log(1 - e^x)` for `x <= 0`, switching between `log1p(-exp)` and
/// `log(-expm1)` at `-ln 2`.
#[inline]
pub fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x == 0.0 {
        f64::NEG_INFINITY
    } else if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;
    #[inline]
    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.is_zero() || rhs.is_zero() {
            return LogWeight::ZERO;
        }
        LogWeight(self.0 + rhs.0)
    }
}

impl Div for LogWeight {
    type Output = LogWeight;
    #[inline]
    fn div(self, rhs: LogWeight) -> LogWeight {
        debug_assert!(!rhs.is_zero(), "division by log(0)");
        if self.is_zero() {
            return LogWeight::ZERO;
        }
        LogWeight(self.0 - rhs.0)
    }
}

/// Shift by a plain log amount (`e^a * e^b` with `b` finite).
impl Add<f64> for LogWeight {
    type Output = LogWeight;
    #[inline]
    fn add(self, rhs: f64) -> LogWeight {
        if self.is_zero() {
            return self;
        }
        LogWeight(self.0 + rhs)
    }
}

impl Sub<f64> for LogWeight {
    type Output = LogWeight;
    #[inline]
    fn sub(self, rhs: f64) -> LogWeight {
        self + (-rhs)
    }
}

impl fmt::Debug for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "LogWeight(log 0)")
        } else {
            write!(f, "LogWeight({})", self.0)
        }
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// `log Σ e^{t_i}` with max-subtraction. Empty input gives `log(0)`.
pub fn log_sum_exp<I>(terms: I) -> LogWeight
where
    I: IntoIterator<Item = LogWeight>,
{
    let mut acc = LogSumExp::new();
    for t in terms {
        acc.push(t);
    }
    acc.total()
}

/// Streaming log-sum-exp. The running maximum is re-based whenever a larger
/// term arrives, so the linear accumulator never exceeds the term count.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, t: LogWeight) {
        let x = t.ln();
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        if other.max <= self.max {
            self.sum += other.sum * (other.max - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        }
    }

    pub fn total(&self) -> LogWeight {
        if self.max == f64::NEG_INFINITY {
            LogWeight::ZERO
        } else {
            LogWeight(self.max + self.sum.ln())
        }
    }
}
