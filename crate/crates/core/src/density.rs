//! The three density families on `[0, 1)`: the Gaussian-exponential family
//! `f_θ(x) = exp{−θ + √(2θ) Φ⁻¹(x)}`, the oscillating step densities of a
//! partition into `2N²` cells, and the cosine family
//! `f_θ(x) ∝ 1 + cos(θx)`.
//!
//! Numeric divergences are computed in probit coordinates `x = Φ(z)`, where
//! the Gaussian-exponential family is log-linear and the `x → 1` singularity
//! of `f_θ` disappears.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{inv_norm_cdf, ln_norm_pdf, norm_cdf};
use crate::numerics::{integrate_log, LogWeight, QuadratureOptions, RandomStream};

/// Probit integration range; Φ(−12) ≈ 1.8e−33.
const PROBIT_LIMIT: f64 = 12.0;
const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

/// A probability density on `[0, 1)`.
pub trait Density: Send + Sync {
    /// `ln f(x)`; domain-checked.
    fn ln_pdf(&self, x: f64) -> Result<LogWeight>;

    /// `ln f(Φ(z))`. Must be defined for every finite `z`.
    fn ln_pdf_probit(&self, z: f64) -> f64;

    /// Interior points of `(0, 1)` where `f` or `√f` jumps or has a kink.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[inline]
fn probit_to_unit(z: f64) -> f64 {
    norm_cdf(z).min(ONE_MINUS_EPS)
}

/// Member `f_θ` of the continuous family, `θ ∈ [0, 1]`; `θ = 0` is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussExpDensity {
    theta: f64,
}

impl GaussExpDensity {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain(format!("theta must lie in [0, 1], got {theta}")));
        }
        Ok(GaussExpDensity { theta })
    }

    pub fn uniform() -> Self {
        GaussExpDensity { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `√(2θ)`, the mean shift of `Φ⁻¹(X)` under this density.
    pub fn shift(&self) -> f64 {
        (2.0 * self.theta).sqrt()
    }
}

impl Density for GaussExpDensity {
    fn ln_pdf(&self, x: f64) -> Result<LogWeight> {
        gauss_exp_logpdf(self, x)
    }

    fn ln_pdf_probit(&self, z: f64) -> f64 {
        -self.theta + self.shift() * z
    }
}

/// `−θ + √(2θ) Φ⁻¹(x)` for `x ∈ (0, 1)`. The endpoints are rejected: the
/// density tends to 0 at `x = 0` and diverges at `x = 1` when `θ > 0`.
pub fn gauss_exp_logpdf(d: &GaussExpDensity, x: f64) -> Result<LogWeight> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "gauss-exp density is evaluated on (0, 1), got x = {x}"
        )));
    }
    if d.theta == 0.0 {
        return Ok(LogWeight::ONE);
    }
    Ok(LogWeight::from_ln(-d.theta + d.shift() * inv_norm_cdf(x)?))
}

/// The partition of `[0, 1)` into `2N²` cells of width `1/(2N²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    level: u64,
}

impl Partition {
    pub fn new(level: u64) -> Result<Self> {
        check_level(level)?;
        Ok(Partition { level })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn cells(&self) -> u64 {
        2 * self.level * self.level
    }

    pub fn width(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn cell_of(&self, x: f64) -> Result<u64> {
        cell_index(x, self.level)
    }
}

/// `floor(2N² x)`, the index of the cell of level `N` containing `x`.
#[inline]
pub fn cell_index(x: f64, level: u64) -> Result<u64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("cell index needs x in [0, 1), got {x}")));
    }
    check_level(level)?;
    Ok(cell_index_unchecked(x, level))
}

/// Largest supported partition level; keeps `2N²` well inside `u64`.
pub const MAX_LEVEL: u64 = 1 << 31;

fn check_level(level: u64) -> Result<()> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::Domain(format!(
            "partition level N must lie in [1, {MAX_LEVEL}], got {level}"
        )));
    }
    Ok(())
}

/// Exact `floor(2N² x)`: `x = m·2^e` is multiplied out in 128-bit integers,
/// so points on either side of a cell boundary never swap cells.
#[inline]
pub(crate) fn cell_index_unchecked(x: f64, level: u64) -> u64 {
    const FRAC: u64 = (1 << 52) - 1;
    let cells = 2 * level * level;
    if x <= 0.0 {
        return 0;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let (mant, exp) = if biased == 0 {
        (bits & FRAC, -1074)
    } else {
        ((bits & FRAC) | (1 << 52), biased - 1075)
    };
    let prod = cells as u128 * mant as u128;
    let idx = if exp >= 0 {
        u64::MAX
    } else if -exp >= 128 {
        0
    } else {
        (prod >> (-exp) as u32) as u64
    };
    idx.min(cells - 1)
}

/// A member of `F_N`: value 2 on exactly `N²` selected cells, 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDensity {
    level: u64,
    selected: Vec<u64>,
}

impl StepDensity {
    /// Validates that `selected` holds exactly `N²` distinct indices below
    /// `2N²`; stores them sorted.
    pub fn new(level: u64, selected: impl IntoIterator<Item = u64>) -> Result<Self> {
        let part = Partition::new(level)?;
        let mut sel: Vec<u64> = selected.into_iter().collect();
        sel.sort_unstable();
        sel.dedup();
        if sel.len() as u64 != level * level {
            return Err(Error::Domain(format!(
                "level {level} step density needs exactly {} distinct cells, got {}",
                level * level,
                sel.len()
            )));
        }
        if let Some(&bad) = sel.iter().find(|&&j| j >= part.cells()) {
            return Err(Error::Domain(format!(
                "cell index {bad} out of range for level {level} ({} cells)",
                part.cells()
            )));
        }
        Ok(StepDensity { level, selected: sel })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn partition(&self) -> Partition {
        Partition { level: self.level }
    }

    /// Sorted selected cell indices.
    pub fn selected(&self) -> &[u64] {
        &self.selected
    }

    pub fn is_selected(&self, cell: u64) -> bool {
        self.selected.binary_search(&cell).is_ok()
    }

    /// Draws `n` points: a selected cell uniformly, then uniform inside it.
    pub fn sample(&self, rs: &mut RandomStream, n: usize) -> Vec<f64> {
        sample_step(self, rs, n)
    }
}

/// 2 on selected cells, 0 elsewhere.
pub fn step_pdf(d: &StepDensity, x: f64) -> Result<f64> {
    let cell = cell_index(x, d.level)?;
    Ok(if d.is_selected(cell) { 2.0 } else { 0.0 })
}

impl Density for StepDensity {
    fn ln_pdf(&self, x: f64) -> Result<LogWeight> {
        Ok(LogWeight::from_value(step_pdf(self, x)?))
    }

    fn ln_pdf_probit(&self, z: f64) -> f64 {
        let cell = cell_index_unchecked(probit_to_unit(z), self.level);
        if self.is_selected(cell) {
            std::f64::consts::LN_2
        } else {
            f64::NEG_INFINITY
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let cells = self.partition().cells();
        (1..cells).map(|j| j as f64 / cells as f64).collect()
    }
}

/// `f_θ(x) = (1 + cos θx) / c(θ)` on `[0, 1]`, `c(θ) = 1 + sin(θ)/θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineDensity {
    theta: f64,
}

impl CosineDensity {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("cosine theta must be >= 0, got {theta}")));
        }
        Ok(CosineDensity { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `ln c(θ)`.
    pub fn ln_normalizer(&self) -> f64 {
        cosine_normalizer(self.theta).ln()
    }
}

/// `c(θ) = 1 + sin(θ)/θ`, with a 4-term Taylor series below `θ = 1e−6`.
pub fn cosine_normalizer(theta: f64) -> f64 {
    if theta < 1e-6 {
        let t2 = theta * theta;
        2.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0
    } else {
        1.0 + theta.sin() / theta
    }
}

/// `ln(1 + cos θx) − ln c(θ)`; `log(0)` at zeros of `1 + cos θx`.
pub fn cosine_logpdf(d: &CosineDensity, x: f64) -> Result<LogWeight> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "cosine density is evaluated on [0, 1], got x = {x}"
        )));
    }
    Ok(cosine_logpdf_unchecked(d.theta, x, d.ln_normalizer()))
}

#[inline]
pub(crate) fn cosine_logpdf_unchecked(theta: f64, x: f64, ln_c: f64) -> LogWeight {
    let v = 1.0 + (theta * x).cos();
    if v <= 0.0 {
        LogWeight::ZERO
    } else {
        LogWeight::from_ln(v.ln() - ln_c)
    }
}

impl Density for CosineDensity {
    fn ln_pdf(&self, x: f64) -> Result<LogWeight> {
        cosine_logpdf(self, x)
    }

    fn ln_pdf_probit(&self, z: f64) -> f64 {
        cosine_logpdf_unchecked(self.theta, probit_to_unit(z), self.ln_normalizer()).ln()
    }

    fn breakpoints(&self) -> Vec<f64> {
        // zeros of 1 + cos θx: θx = (2j+1)π
        let mut out = Vec::new();
        if self.theta > 0.0 {
            let mut j = 0.0;
            loop {
                let x = (2.0 * j + 1.0) * std::f64::consts::PI / self.theta;
                if x >= 1.0 {
                    break;
                }
                out.push(x);
                j += 1.0;
            }
        }
        out
    }
}

/// Draws `X = Φ(√(2θ) + Z)`, `Z` standard normal; the density of `X` is
/// `f_θ`. Results are kept inside the open unit interval.
pub fn sample_gauss_exp(d: &GaussExpDensity, rs: &mut RandomStream, n: usize) -> Vec<f64> {
    let shift = d.shift();
    (0..n)
        .map(|_| {
            let x = norm_cdf(shift + rs.next_normal());
            x.clamp(f64::MIN_POSITIVE, ONE_MINUS_EPS)
        })
        .collect()
}

/// Picks a selected cell uniformly, then a uniform point inside it. Points
/// lie in the open interval `(0, 1)`.
pub fn sample_step(d: &StepDensity, rs: &mut RandomStream, n: usize) -> Vec<f64> {
    let cells = d.partition().cells() as f64;
    (0..n)
        .map(|_| {
            let cell = d.selected[rs.next_below(d.selected.len() as u64) as usize];
            let x = (cell as f64 + rs.next_open01()) / cells;
            if x >= 1.0 || cell_index_unchecked(x, d.level) != cell {
                (cell as f64 + 0.5) / cells
            } else {
                x
            }
        })
        .collect()
}

/// `KL(f_θ1, f_θ2) = (θ2 − θ1) + √(2θ1)(√(2θ1) − √(2θ2))`.
pub fn kl_gauss_exp(theta1: f64, theta2: f64) -> Result<f64> {
    let a = GaussExpDensity::new(theta1)?.shift();
    let b = GaussExpDensity::new(theta2)?.shift();
    // (θ2 − θ1) + a(a − b) with θ = a²/2 simplifies to (a − b)²/2
    Ok(0.5 * (a - b) * (a - b))
}

/// Hellinger affinity `∫√(f_θ1 f_θ2) = exp{−(√θ1 − √θ2)²/4}`.
pub fn affinity_gauss_exp(theta1: f64, theta2: f64) -> Result<f64> {
    let a = GaussExpDensity::new(theta1)?.theta().sqrt();
    let b = GaussExpDensity::new(theta2)?.theta().sqrt();
    Ok((-(a - b) * (a - b) / 4.0).exp())
}

/// `d_h(f_θ1, f_θ2) = √(2 − 2 exp{−(√θ1 − √θ2)²/4})`.
pub fn hellinger_gauss_exp(theta1: f64, theta2: f64) -> Result<f64> {
    let a = GaussExpDensity::new(theta1)?.theta().sqrt();
    let b = GaussExpDensity::new(theta2)?.theta().sqrt();
    let q = (a - b) * (a - b) / 4.0;
    // 2 − 2e^{−q} = −2 expm1(−q)
    Ok((-2.0 * (-q).exp_m1()).sqrt())
}

/// Every step density sits at `√(2 − √2)` from the uniform: the affinity is
/// `√2 · ½`.
pub fn hellinger_step_uniform(_d: &StepDensity) -> f64 {
    (2.0 - std::f64::consts::SQRT_2).sqrt()
}

/// `ln |e^a − e^b|`.
#[inline]
fn ln_abs_diff(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    LogWeight::from_ln(hi)
        .ln_sub(LogWeight::from_ln(lo))
        .map_or(f64::NEG_INFINITY, |w| w.ln())
}

fn probit_breakpoints(f: &dyn Density, g: &dyn Density) -> Vec<f64> {
    let mut zs: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .chain(g.breakpoints())
        .filter(|&x| x > 0.0 && x < 1.0)
        .map(|x| inv_norm_cdf(x).expect("interior breakpoint"))
        .filter(|z| z.abs() < PROBIT_LIMIT)
        .collect();
    zs.push(-PROBIT_LIMIT);
    zs.push(0.0);
    zs.push(PROBIT_LIMIT);
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    zs
}

/// `∫ f` over `[0, 1)` by probit-space quadrature.
pub fn total_mass(f: &dyn Density, rel_tol: f64) -> Result<f64> {
    let zs = probit_breakpoints(f, f);
    let r = integrate_log(
        |z| f.ln_pdf_probit(z) + ln_norm_pdf(z),
        &zs,
        QuadratureOptions::with_rel_tol(rel_tol),
    )?;
    Ok(r.estimate())
}

/// `d_h(f, g) = (∫(√f − √g)²)^{1/2}` by probit-space quadrature, split at
/// every breakpoint of either density (cell boundaries for step densities).
pub fn hellinger_numeric(f: &dyn Density, g: &dyn Density) -> Result<f64> {
    let zs = probit_breakpoints(f, g);
    let r = integrate_log(
        |z| {
            let d = ln_abs_diff(0.5 * f.ln_pdf_probit(z), 0.5 * g.ln_pdf_probit(z));
            if d == f64::NEG_INFINITY {
                d
            } else {
                2.0 * d + ln_norm_pdf(z)
            }
        },
        &zs,
        QuadratureOptions::with_rel_tol(1e-10),
    )?;
    Ok(r.estimate().sqrt())
}

/// `ψ(u) = e^u (u − 1) + 1 ≥ 0`, so that `f ln(f/g) − f + g = g ψ(ln f/g)`.
fn ln_kl_kernel(u: f64) -> f64 {
    if u == f64::NEG_INFINITY {
        return 0.0;
    }
    let v = if u.abs() < 0.1 {
        // Σ_{k≥2} (k−1) u^k / k!
        let mut term = u; // u^k / k! at k = 1
        let mut s = 0.0;
        for k in 2..20 {
            term *= u / k as f64;
            s += (k - 1) as f64 * term;
        }
        s
    } else {
        u.exp() * (u - 1.0) + 1.0
    };
    if v <= 0.0 {
        f64::NEG_INFINITY
    } else {
        v.ln()
    }
}

/// `KL(f, g) = ∫ f ln(f/g)` by probit-space quadrature of the nonnegative
/// integrand `f ln(f/g) − f + g` (both densities integrate to one).
/// Returns `+∞` when `f` puts mass where `g` vanishes.
pub fn kl_numeric(f: &dyn Density, g: &dyn Density) -> Result<f64> {
    let zs = probit_breakpoints(f, g);
    let cell = std::cell::Cell::new(false);
    let r = integrate_log(
        |z| {
            let lf = f.ln_pdf_probit(z);
            let lg = g.ln_pdf_probit(z);
            if lg == f64::NEG_INFINITY {
                if lf > f64::NEG_INFINITY {
                    cell.set(true);
                }
                return f64::NEG_INFINITY;
            }
            lg + ln_kl_kernel(lf - lg) + ln_norm_pdf(z)
        },
        &zs,
        QuadratureOptions::with_rel_tol(1e-10),
    )?;
    if cell.get() {
        return Ok(f64::INFINITY);
    }
    Ok(r.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_stream;
    use proptest::prelude::*;

    fn grid10() -> Vec<f64> {
        (0..10).map(|i| i as f64 / 9.0).collect()
    }

    #[test]
    fn gauss_exp_logpdf_examples() {
        let u = GaussExpDensity::uniform();
        for x in [1e-9, 0.3, 0.999] {
            assert_eq!(gauss_exp_logpdf(&u, x).unwrap().ln(), 0.0);
        }
        let d = GaussExpDensity::new(0.5).unwrap();
        let l = gauss_exp_logpdf(&d, 0.5).unwrap();
        assert!((l.ln() + 0.5).abs() < 1e-15);
        assert!((l.value() - 0.606531).abs() < 1e-6);
        let l = gauss_exp_logpdf(&d, norm_cdf(1.0)).unwrap();
        assert!((l.ln() - 0.5).abs() < 1e-12);
        assert!((l.value() - 1.648721).abs() < 1e-6);
        // the six-digit rounding of Φ(1) moves the quantile by about 1.2e−6
        let l = gauss_exp_logpdf(&d, 0.841345).unwrap();
        assert!((l.value() - 1.648721).abs() < 1e-5);
        assert!(gauss_exp_logpdf(&d, 0.0).is_err());
        assert!(gauss_exp_logpdf(&d, 1.0).is_err());
        assert!(GaussExpDensity::new(1.5).is_err());
        assert!(GaussExpDensity::new(-0.1).is_err());
    }

    #[test]
    fn cell_index_examples() {
        assert_eq!(cell_index(0.3, 2).unwrap(), 2);
        for n in [1, 2, 7, 1000] {
            assert_eq!(cell_index(0.0, n).unwrap(), 0);
        }
        assert_eq!(cell_index(0.999, 1).unwrap(), 1);
        assert!(cell_index(1.0, 1).is_err());
        assert!(cell_index(-0.1, 1).is_err());
        assert!(cell_index(0.5, 0).is_err());
    }

    #[test]
    fn cell_index_is_exact_at_boundaries() {
        // the double nearest 0.3 lies below 3/10; 50·0.3 rounds up to 15.0
        // in floating point but the true product is just under 15
        assert_eq!(50.0f64 * 0.3, 15.0);
        assert_eq!(cell_index(0.3, 5).unwrap(), 14);
        // the double nearest 0.1 lies above 1/10
        assert_eq!(cell_index(0.1, 5).unwrap(), 5);
        let below = f64::from_bits(0.25f64.to_bits() - 1);
        assert_eq!(cell_index(below, 2).unwrap(), 1);
        assert_eq!(cell_index(0.25, 2).unwrap(), 2);
        assert_eq!(cell_index(f64::from_bits(1), 3).unwrap(), 0);
        assert_eq!(cell_index(ONE_MINUS_EPS, 1_000_000).unwrap(), 2_000_000_000_000 - 1);
        // agrees with f64 arithmetic away from boundaries
        let mut rs = RandomStream::new(5, 0);
        for _ in 0..10_000 {
            let x = rs.next_f64();
            let n = 1 + rs.next_below(3000);
            let cells = (2 * n * n) as f64;
            let approx = cells * x;
            if (approx - approx.round()).abs() > 1e-6 {
                assert_eq!(cell_index(x, n).unwrap(), approx as u64);
            }
        }
    }

    #[test]
    fn step_pdf_examples() {
        let d = StepDensity::new(1, [0]).unwrap();
        assert_eq!(step_pdf(&d, 0.2).unwrap(), 2.0);
        assert_eq!(step_pdf(&d, 0.7).unwrap(), 0.0);
        assert!(step_pdf(&d, 1.0).is_err());
        assert!(StepDensity::new(2, [0, 1, 2]).is_err());
        assert!(StepDensity::new(1, [2]).is_err());
        assert!(StepDensity::new(2, [0, 1, 2, 2]).is_err());
        for d in [d, StepDensity::new(3, [0, 2, 4, 6, 8, 10, 12, 14, 16]).unwrap()] {
            let m = total_mass(&d, 1e-12).unwrap();
            assert!((m - 1.0).abs() < 1e-9, "mass {m}");
            // the maximum value of any step density is 2
            let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
            let max = xs.iter().map(|&x| step_pdf(&d, x).unwrap()).fold(0.0, f64::max);
            assert_eq!(max, 2.0);
        }
    }

    #[test]
    fn normalization_gauss_exp_and_cosine() {
        for i in 0..=10 {
            let d = GaussExpDensity::new(i as f64 / 10.0).unwrap();
            let m = total_mass(&d, 1e-12).unwrap();
            assert!((m - 1.0).abs() <= 1e-8, "theta={} mass={m}", d.theta());
        }
        for theta in [0.0, 1.0, std::f64::consts::PI, 10.0, 50.0] {
            let d = CosineDensity::new(theta).unwrap();
            let m = total_mass(&d, 1e-12).unwrap();
            assert!((m - 1.0).abs() <= 1e-8, "theta={theta} mass={m}");
        }
    }

    #[test]
    fn kl_examples_and_closed_form() {
        assert_eq!(kl_gauss_exp(0.5, 0.5).unwrap(), 0.0);
        assert!((kl_gauss_exp(0.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((kl_gauss_exp(0.25, 1.0).unwrap() - 0.25).abs() < 1e-15);
        // the literal closed form
        for &a in &grid10() {
            for &b in &grid10() {
                let lit = (b - a) + (2.0 * a).sqrt() * ((2.0 * a).sqrt() - (2.0 * b).sqrt());
                assert!((kl_gauss_exp(a, b).unwrap() - lit).abs() < 1e-14);
            }
        }
        // KL(f₀, f_θ) = θ
        for &t in &grid10() {
            assert!((kl_gauss_exp(0.0, t).unwrap() - t).abs() < 1e-15);
        }
    }

    #[test]
    fn kl_closed_form_matches_quadrature() {
        for &a in &grid10() {
            for &b in &grid10() {
                let fa = GaussExpDensity::new(a).unwrap();
                let fb = GaussExpDensity::new(b).unwrap();
                let num = kl_numeric(&fa, &fb).unwrap();
                let cf = kl_gauss_exp(a, b).unwrap();
                assert!((num - cf).abs() < 1e-6, "({a},{b}) numeric {num} closed {cf}");
            }
        }
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_gauss_exp(0.4, 0.4).unwrap(), 0.0);
        assert!((hellinger_gauss_exp(0.0, 1.0).unwrap() - 0.665130).abs() < 1e-6);
        assert!((hellinger_gauss_exp(0.25, 1.0).unwrap() - 0.348100).abs() < 1e-6);
        let s = StepDensity::new(1, [0]).unwrap();
        assert!((hellinger_step_uniform(&s) - 0.765367).abs() < 1e-6);
    }

    #[test]
    fn hellinger_closed_form_matches_quadrature() {
        for &a in &grid10() {
            for &b in &grid10() {
                let fa = GaussExpDensity::new(a).unwrap();
                let fb = GaussExpDensity::new(b).unwrap();
                let num = hellinger_numeric(&fa, &fb).unwrap();
                let cf = hellinger_gauss_exp(a, b).unwrap();
                assert!((num - cf).abs() < 1e-6, "({a},{b}) numeric {num} closed {cf}");
            }
        }
    }

    #[test]
    fn hellinger_step_numeric() {
        let u = GaussExpDensity::uniform();
        let target = (2.0 - std::f64::consts::SQRT_2).sqrt();
        let s1 = StepDensity::new(1, [0]).unwrap();
        let s3 = StepDensity::new(3, [1, 2, 3, 5, 8, 9, 13, 16, 17]).unwrap();
        for s in [&s1, &s3] {
            let d = hellinger_numeric(&u, s).unwrap();
            assert!((d - target).abs() < 1e-9, "{d}");
        }
        let other = StepDensity::new(1, [1]).unwrap();
        let d = hellinger_numeric(&s1, &other).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-9);
        assert_eq!(hellinger_numeric(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn hellinger_metric_properties() {
        let mut rs = RandomStream::new(99, 0);
        let ts = uniform_stream(&mut rs, 300);
        for tri in ts.chunks(3) {
            let (a, b, c) = (tri[0], tri[1], tri[2]);
            let ab = hellinger_gauss_exp(a, b).unwrap();
            let ba = hellinger_gauss_exp(b, a).unwrap();
            let bc = hellinger_gauss_exp(b, c).unwrap();
            let ac = hellinger_gauss_exp(a, c).unwrap();
            assert_eq!(ab, ba);
            assert!((0.0..=std::f64::consts::SQRT_2).contains(&ab));
            assert!(ac <= ab + bc + 1e-15);
        }
    }

    #[test]
    fn cosine_examples() {
        let d0 = CosineDensity::new(0.0).unwrap();
        for x in [0.0, 0.4, 1.0] {
            assert!(cosine_logpdf(&d0, x).unwrap().ln().abs() < 1e-15);
        }
        let dpi = CosineDensity::new(std::f64::consts::PI).unwrap();
        assert!(cosine_logpdf(&dpi, 1.0).unwrap().is_zero());
        assert!((cosine_normalizer(std::f64::consts::PI) - 1.0).abs() < 1e-15);
        let d2pi = CosineDensity::new(2.0 * std::f64::consts::PI).unwrap();
        assert!(cosine_logpdf(&d2pi, 0.5).unwrap().is_zero());
        assert!(CosineDensity::new(-1.0).is_err());
        assert!(cosine_logpdf(&d0, 1.5).is_err());
        // series and direct forms agree near the switch
        let t = 1.0000001e-6;
        assert!((cosine_normalizer(t) - (1.0 + t.sin() / t)).abs() < 1e-15);
    }

    #[test]
    fn cosine_sup_ratio_bound() {
        // max_x f_θ(x) ≤ 2/c(θ) = 2θ/(θ + sin θ), a finite likelihood-ratio bound against the uniform
        let mut beta = 0.0f64;
        for i in 1..=1000 {
            let theta = i as f64 * 0.1;
            let d = CosineDensity::new(theta).unwrap();
            let bound = 2.0 * theta / (theta + theta.sin());
            let max = (0..=10_000)
                .map(|j| cosine_logpdf(&d, j as f64 / 10_000.0).unwrap().value())
                .fold(0.0, f64::max);
            assert!(max <= bound * (1.0 + 1e-12), "theta={theta}");
            beta = beta.max(bound.ln());
        }
        assert!(beta.is_finite() && beta < 1.0);
    }

    #[test]
    fn gauss_exp_sampling() {
        let mut rs = RandomStream::new(11, 0);
        let d = GaussExpDensity::new(0.5).unwrap();
        let n = 100_000;
        let xs = sample_gauss_exp(&d, &mut rs, n);
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        let mean: f64 = xs.iter().map(|&x| inv_norm_cdf(x).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        // chi-square goodness of fit against the CDF of f_θ: F(x) = Φ(Φ⁻¹(x) − √(2θ))
        let bins = 50;
        let mut counts = vec![0usize; bins];
        for &x in &xs {
            counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let cdf = |x: f64| {
            if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1.0
            } else {
                norm_cdf(inv_norm_cdf(x).unwrap() - 1.0)
            }
        };
        let chi2: f64 = (0..bins)
            .map(|b| {
                let p = cdf((b + 1) as f64 / bins as f64) - cdf(b as f64 / bins as f64);
                let e = p * n as f64;
                (counts[b] as f64 - e).powi(2) / e
            })
            .sum();
        // 49 dof, 0.001 upper quantile 85.35
        assert!(chi2 < 85.35, "chi2 {chi2}");
        let again = sample_gauss_exp(&d, &mut RandomStream::new(11, 0), n);
        assert_eq!(xs, again);
    }

    #[test]
    fn theta_zero_sampling_is_uniform() {
        let mut rs = RandomStream::new(3, 0);
        let xs = sample_gauss_exp(&GaussExpDensity::uniform(), &mut rs, 50_000);
        let bins = 20;
        let mut counts = vec![0usize; bins];
        for &x in &xs {
            counts[(x * bins as f64) as usize] += 1;
        }
        let e = xs.len() as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 19 dof, 0.001 upper quantile 43.82
        assert!(chi2 < 43.82, "chi2 {chi2}");
    }

    #[test]
    fn step_sampling() {
        let d = StepDensity::new(1, [0]).unwrap();
        let mut rs = RandomStream::new(1, 0);
        assert!(sample_step(&d, &mut rs, 0).is_empty());
        assert!(sample_step(&d, &mut rs, 1000).iter().all(|&x| (0.0..0.5).contains(&x)));
        let d = StepDensity::new(3, [0, 2, 3, 5, 7, 11, 13, 15, 17]).unwrap();
        let n = 100_000;
        let xs = sample_step(&d, &mut rs, n);
        let mut counts = std::collections::BTreeMap::new();
        for &x in &xs {
            let c = cell_index(x, 3).unwrap();
            assert!(d.is_selected(c));
            *counts.entry(c).or_insert(0usize) += 1;
        }
        let e = n as f64 / 9.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 8 dof, 0.001 upper quantile 26.12
        assert!(chi2 < 26.12, "chi2 {chi2}");
    }

    proptest! {
        #[test]
        fn kl_nonnegative_zero_iff_equal(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let k = kl_gauss_exp(a, b).unwrap();
            prop_assert!(k >= 0.0);
            if a != b && (a.sqrt() - b.sqrt()).abs() > 1e-8 {
                prop_assert!(k > 0.0);
            }
        }
    }
}
