use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{LogWeight, QuadratureResult};

/// Outward log slack applied after every combine.
pub const COMBINE_SLACK: f64 = 1e-13;

/// A certified interval `[lower, upper]` on a nonnegative quantity, held in
/// log-space.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketedValue {
    pub lower: LogWeight,
    pub upper: LogWeight,
}

impl BracketedValue {
    pub fn new(lower: LogWeight, upper: LogWeight) -> Self {
        debug_assert!(lower.ln() <= upper.ln(), "inverted bracket {lower:?} > {upper:?}");
        BracketedValue { lower, upper }
    }

    pub fn exact(v: LogWeight) -> Self {
        BracketedValue { lower: v, upper: v }
    }

    pub fn zero() -> Self {
        Self::exact(LogWeight::ZERO)
    }

    pub fn one() -> Self {
        Self::exact(LogWeight::ONE)
    }

    /// `estimate ± abs_error`.
    pub fn from_quadrature(q: &QuadratureResult) -> Self {
        let (lo, hi) = q.bracket();
        BracketedValue { lower: lo, upper: hi }
    }

    pub fn lower_value(&self) -> f64 {
        self.lower.value()
    }

    pub fn upper_value(&self) -> f64 {
        self.upper.value()
    }

    /// Midpoint on the linear scale.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower_value() + self.upper_value())
    }

    /// `(upper − lower) / upper`; 0 for an exact zero.
    pub fn rel_width(&self) -> f64 {
        if self.upper.is_zero() {
            return 0.0;
        }
        -(self.lower.ln() - self.upper.ln()).exp_m1()
    }

    pub fn abs_width(&self) -> f64 {
        self.upper_value() - self.lower_value()
    }

    pub fn contains(&self, v: LogWeight) -> bool {
        self.lower.ln() <= v.ln() && v.ln() <= self.upper.ln()
    }

    /// Whether `[lower, upper]` contains the linear value `v` within `tol`.
    pub fn contains_value(&self, v: f64, tol: f64) -> bool {
        self.lower_value() - tol <= v && v <= self.upper_value() + tol
    }

    pub fn is_subset_of(&self, other: &BracketedValue) -> bool {
        other.lower.ln() <= self.lower.ln() && self.upper.ln() <= other.upper.ln()
    }

    /// Outward rounding by `slack` in log-space.
    pub fn widen(self, slack: f64) -> Self {
        BracketedValue {
            lower: self.lower.nudge_down(slack),
            upper: self.upper.nudge_up(slack),
        }
    }

    pub fn add(&self, other: &BracketedValue) -> Self {
        BracketedValue {
            lower: self.lower.ln_add(other.lower),
            upper: self.upper.ln_add(other.upper),
        }
        .widen(COMBINE_SLACK)
    }

    pub fn mul(&self, other: &BracketedValue) -> Self {
        BracketedValue {
            lower: self.lower * other.lower,
            upper: self.upper * other.upper,
        }
        .widen(COMBINE_SLACK)
    }

    /// Multiplication by an exact factor.
    pub fn scale(&self, w: LogWeight) -> Self {
        BracketedValue {
            lower: self.lower * w,
            upper: self.upper * w,
        }
        .widen(COMBINE_SLACK)
    }

    /// Clamps to a probability: `upper ≤ 1`.
    pub fn clamp_probability(self) -> Self {
        let upper = self.upper.min(LogWeight::ONE);
        BracketedValue {
            lower: self.lower.min(upper),
            upper,
        }
    }

    /// `self / den` for a ratio known to be a probability.
    pub fn ratio_probability(&self, den: &BracketedValue) -> Self {
        let lower = if den.upper.is_zero() {
            LogWeight::ZERO
        } else {
            self.lower / den.upper
        };
        let upper = if den.lower.is_zero() {
            LogWeight::ONE
        } else {
            self.upper / den.lower
        };
        BracketedValue { lower, upper }.widen(COMBINE_SLACK).clamp_probability()
    }
}

/// Normalizes two nonnegative brackets into probabilities `a/(a+b)` and
/// `b/(a+b)`. Matched endpoints sum to one: the lower end of one pairs with
/// the upper end of the other.
pub fn normalize_pair(a: &BracketedValue, b: &BracketedValue) -> (BracketedValue, BracketedValue) {
    let part = |num_lo: LogWeight, num_hi: LogWeight, oth_lo: LogWeight, oth_hi: LogWeight| {
        let lower = if num_lo.is_zero() {
            LogWeight::ZERO
        } else {
            num_lo / num_lo.ln_add(oth_hi)
        };
        let upper = if num_hi.is_zero() {
            LogWeight::ZERO
        } else {
            num_hi / num_hi.ln_add(oth_lo)
        };
        BracketedValue { lower, upper }.widen(COMBINE_SLACK).clamp_probability()
    };
    (
        part(a.lower, a.upper, b.lower, b.upper),
        part(b.lower, b.upper, a.lower, a.upper),
    )
}

impl fmt::Debug for BracketedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lower_value(), self.upper_value())
    }
}
