//! Special functions: the standard normal CDF and its inverse, log falling
//! factorial ratios, and certified bounds for the tail of Σ 1/N².

use crate::error::{Error, Result};
use crate::numerics::LogWeight;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF Φ(z), via `erfc` so that both tails keep relative
/// precision.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(z).
pub fn norm_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Log of the standard normal density.
#[inline]
pub fn ln_norm_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

// Acklam's rational approximation, relative error about 1.15e-9 before
// refinement.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Φ⁻¹(p): rational initial guess followed by one Halley step against the
/// erfc-based CDF. In the upper half the residual is formed against the
/// exact complement `1 − p`.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("inv_norm_cdf requires 0 < p < 1, got {p}")));
    }
    let x = acklam(p);
    let e = if x <= 0.0 {
        norm_cdf(x) - p
    } else {
        (1.0 - p) - norm_sf(x)
    };
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Threshold above which the Stirling-difference path is used.
const DIRECT_SUM_MAX_K: u64 = 64;
const STIRLING_MIN_ARG: u64 = 32;

/// `ln Γ(a + k) − ln Γ(a)` for `a ≥ 32`, from differences of the Stirling
/// series arranged so that no large terms cancel.
fn ln_gamma_shift(a: f64, k: f64) -> f64 {
    fn corr(x: f64) -> f64 {
        let x2 = x * x;
        (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
    }
    (a - 0.5) * (k / a).ln_1p() + k * (a + k).ln() - k + (corr(a + k) - corr(a))
}

/// `ln[(m)_k / (m2)_k]` where `(m)_k = m (m−1) … (m−k+1)` is the falling
/// factorial. With `m = N²`, `m2 = 2N²` this is
/// `ln[C(2N²−k, N²−k) / C(2N², N²)]`.
///
/// Returns `log(0)` when `k > m`.
pub fn log_falling_factorial_ratio(m: u64, m2: u64, k: u64) -> Result<LogWeight> {
    if m > m2 {
        return Err(Error::Domain(format!(
            "falling factorial ratio needs m <= m2, got m={m}, m2={m2}"
        )));
    }
    if k > m2 {
        return Err(Error::Domain(format!(
            "falling factorial ratio needs k <= m2, got k={k}, m2={m2}"
        )));
    }
    if k > m {
        return Ok(LogWeight::ZERO);
    }
    if k == 0 || m == m2 {
        return Ok(LogWeight::ONE);
    }
    let gap = (m2 - m) as f64;
    // the Stirling route loses relative precision when m/m2 is close to 1
    let well_conditioned = gap / m2 as f64 >= 0.05;
    if k > DIRECT_SUM_MAX_K && m - k + 1 >= STIRLING_MIN_ARG && well_conditioned {
        let k_f = k as f64;
        let num = ln_gamma_shift((m - k + 1) as f64, k_f);
        let den = ln_gamma_shift((m2 - k + 1) as f64, k_f);
        return Ok(LogWeight::from_ln(num - den));
    }
    let mut s = 0.0;
    for i in 0..k {
        s += (-gap / (m2 - i) as f64).ln_1p();
    }
    Ok(LogWeight::from_ln(s))
}

/// Certified bracket on ψ₁(x) = Σ_{j≥0} 1/(x+j)² for `x ≥ 1`.
///
/// Recurses up to `x ≥ 10`, then uses the enveloping asymptotic series
/// 1/x + 1/(2x²) + 1/(6x³) − 1/(30x⁵) + 1/(42x⁷) − …, whose truncation error
/// carries the sign of, and is bounded by, the first omitted term.
pub fn trigamma_bounds(x: f64) -> (f64, f64) {
    debug_assert!(x >= 1.0);
    let mut head = 0.0;
    let mut y = x;
    while y < 10.0 {
        head += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let base = inv + 0.5 * inv2 + inv2 * inv / 6.0;
    let t5 = inv2 * inv2 * inv / 30.0;
    let t7 = inv2 * inv2 * inv2 * inv / 42.0;
    let lower = base - t5;
    let upper = lower + t7;
    (head + lower, head + upper)
}
