//! Sufficient statistics for both halves of the prior.
//!
//! The continuous family only sees `S_n = Σ Φ⁻¹(xᵢ)`. The step families only
//! see, for each level `N`, the number `k_N` of occupied cells of the level-`N`
//! partition. Because cells are intervals and the sample is kept sorted, a new
//! point opens a fresh cell at level `N` exactly when its cell differs from the
//! cells of both its sorted neighbours; an update therefore costs one
//! comparison per maintained level.

use std::collections::BTreeMap;
use std::ops::Bound;

use crate::density::cell_index_unchecked;
use crate::error::{Error, Result};
use crate::numerics::inv_norm_cdf;

/// Safety factor on the separation condition `1/(2N²) < min_gap`, absorbing
/// the rounding in a floating-point gap.
const GAP_SAFETY: f64 = 1.0 - 1e-9;

/// Upper limit on the number of explicitly maintained levels.
pub const MAX_MAINTAINED_LEVEL: u64 = 1 << 22;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SufficientStats {
    n: u64,
    s: f64,
    s_comp: f64,
    // keys are the IEEE bits of points in (0, 1), which sort like the values
    points: BTreeMap<u64, u32>,
    min_gap: f64,
}

/// Where a new point landed relative to the existing sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Insertion {
    Duplicate,
    Distinct { pred: Option<f64>, succ: Option<f64> },
}

impl SufficientStats {
    pub fn new() -> Self {
        SufficientStats {
            min_gap: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `S_n = Σ Φ⁻¹(xᵢ)` (compensated sum).
    pub fn s_n(&self) -> f64 {
        self.s + self.s_comp
    }

    /// `W_n = S_n / n`; 0 for the empty sample.
    pub fn w_n(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.s_n() / self.n as f64
        }
    }

    /// Smallest positive gap between consecutive distinct points; `+∞` with
    /// fewer than two distinct points.
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn distinct(&self) -> u64 {
        self.points.len() as u64
    }

    /// The sample in nondecreasing order, with multiplicity.
    pub fn sorted_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.points
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat_n(f64::from_bits(k), c as usize))
    }

    pub fn distinct_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.keys().map(|&k| f64::from_bits(k))
    }

    /// Nearest sample points strictly below and strictly above `x`, and
    /// whether `x` itself is in the sample.
    pub fn neighbours(&self, x: f64) -> (Option<f64>, bool, Option<f64>) {
        let key = x.to_bits();
        let pred = self.points.range(..key).next_back().map(|(&k, _)| f64::from_bits(k));
        let succ = self
            .points
            .range((Bound::Excluded(key), Bound::Unbounded))
            .next()
            .map(|(&k, _)| f64::from_bits(k));
        (pred, self.points.contains_key(&key), succ)
    }

    /// Adds `x ∈ (0, 1)`.
    pub fn push(&mut self, x: f64) -> Result<Insertion> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("observations must lie in (0, 1), got {x}")));
        }
        let z = inv_norm_cdf(x)?;
        // Neumaier summation
        let t = self.s + z;
        if self.s.abs() >= z.abs() {
            self.s_comp += (self.s - t) + z;
        } else {
            self.s_comp += (z - t) + self.s;
        }
        self.s = t;
        self.n += 1;

        let (pred, present, succ) = self.neighbours(x);
        *self.points.entry(x.to_bits()).or_insert(0) += 1;
        if present {
            return Ok(Insertion::Duplicate);
        }
        if let Some(p) = pred {
            self.min_gap = self.min_gap.min(x - p);
        }
        if let Some(q) = succ {
            self.min_gap = self.min_gap.min(q - x);
        }
        Ok(Insertion::Distinct { pred, succ })
    }
}

/// Smallest `N` with cell width `1/(2N²)` safely below `min_gap`; 1 when the
/// sample has fewer than two distinct points.
pub fn distinct_level(min_gap: f64) -> u64 {
    if !min_gap.is_finite() {
        return 1;
    }
    let g = min_gap * GAP_SAFETY;
    let separated = |n: u64| 2.0 * (n as f64) * (n as f64) * g > 1.0;
    let mut n = ((0.5 / g).sqrt().floor() as u64).max(1);
    while !separated(n) {
        n += 1;
    }
    while n > 1 && separated(n - 1) {
        n -= 1;
    }
    n
}

/// Occupied-cell counts `k_N`. Levels `N < N_distinct` are stored; at and
/// above `N_distinct` distinct points never share a cell, so `k_N` equals
/// the number of distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyStats {
    counts: Vec<u32>,
    distinct: u64,
}

impl Default for OccupancyStats {
    fn default() -> Self {
        Self::new()
    }
}

impl OccupancyStats {
    pub fn new() -> Self {
        OccupancyStats {
            counts: Vec::new(),
            distinct: 0,
        }
    }

    /// `N_distinct`.
    pub fn distinct_level(&self) -> u64 {
        self.counts.len() as u64 + 1
    }

    pub fn distinct(&self) -> u64 {
        self.distinct
    }

    /// `k_N` for `N ≥ 1`.
    #[inline]
    pub fn k(&self, level: u64) -> u64 {
        debug_assert!(level >= 1);
        match self.counts.get(level as usize - 1) {
            Some(&c) => c as u64,
            None => self.distinct,
        }
    }

    /// Brute-force recount of every level below `N_distinct` from the sorted
    /// sample. Used for audits.
    pub fn recompute(stats: &SufficientStats) -> Result<Self> {
        let nd = checked_distinct_level(stats.min_gap())?;
        let pts: Vec<f64> = stats.distinct_points().collect();
        let counts = (1..nd)
            .map(|level| {
                let mut k = 0u32;
                let mut last = None;
                for &x in &pts {
                    let c = cell_index_unchecked(x, level);
                    if last != Some(c) {
                        k += 1;
                        last = Some(c);
                    }
                }
                k
            })
            .collect();
        Ok(OccupancyStats {
            counts,
            distinct: pts.len() as u64,
        })
    }

    fn apply(&mut self, x: f64, ins: Insertion, min_gap: f64) -> Result<()> {
        let Insertion::Distinct { pred, succ } = ins else {
            return Ok(());
        };
        let nd = checked_distinct_level(min_gap)?;
        let fill = u32::try_from(self.distinct).map_err(|_| Error::Precondition("too many distinct points".into()))?;
        // levels that were separated before this point arrived
        self.counts.resize(nd as usize - 1, fill);
        for (i, k) in self.counts.iter_mut().enumerate() {
            let level = i as u64 + 1;
            let c = cell_index_unchecked(x, level);
            let shared = pred.is_some_and(|p| cell_index_unchecked(p, level) == c)
                || succ.is_some_and(|q| cell_index_unchecked(q, level) == c);
            if !shared {
                *k += 1;
            }
        }
        self.distinct += 1;
        Ok(())
    }
}

fn checked_distinct_level(min_gap: f64) -> Result<u64> {
    let nd = distinct_level(min_gap);
    if nd > MAX_MAINTAINED_LEVEL {
        return Err(Error::Precondition(format!(
            "distinct points are {min_gap:e} apart; separating them needs partition level {nd}, above the supported {MAX_MAINTAINED_LEVEL}"
        )));
    }
    Ok(nd)
}

/// Adds `x` to both statistics.
pub fn update_stats(stats: &mut SufficientStats, occ: &mut OccupancyStats, x: f64) -> Result<()> {
    let before = stats.clone();
    let ins = stats.push(x)?;
    if let Err(e) = occ.apply(x, ins, stats.min_gap()) {
        *stats = before;
        return Err(e);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{uniform_stream, RandomStream};
    use proptest::prelude::*;

    fn build(xs: &[f64]) -> (SufficientStats, OccupancyStats) {
        let mut s = SufficientStats::new();
        let mut o = OccupancyStats::new();
        for &x in xs {
            update_stats(&mut s, &mut o, x).unwrap();
        }
        (s, o)
    }

    // independent count: distinct floor(2N²x) values via a hash set
    fn oracle_k(xs: &[f64], level: u64) -> u64 {
        let cells = 2 * level * level;
        xs.iter()
            .map(|&x| {
                let v = cells as f64 * x;
                v.floor() as u64
            })
            .collect::<std::collections::HashSet<_>>()
            .len() as u64
    }

    #[test]
    fn examples() {
        let (s, o) = build(&[0.5]);
        assert_eq!(s.n(), 1);
        assert_eq!(s.s_n(), 0.0);
        for level in 1..100 {
            assert_eq!(o.k(level), 1);
        }
        let (_, o) = build(&[0.1, 0.3, 0.7]);
        assert_eq!(o.k(1), 2);
        assert_eq!(o.k(2), 3);
        let mut s = SufficientStats::new();
        let mut o = OccupancyStats::new();
        assert!(update_stats(&mut s, &mut o, 0.0).is_err());
        assert!(update_stats(&mut s, &mut o, 1.0).is_err());
        assert!(update_stats(&mut s, &mut o, f64::NAN).is_err());
        assert_eq!(s.n(), 0);
    }

    #[test]
    fn duplicates_do_not_open_cells() {
        let (s, o) = build(&[0.2, 0.2, 0.6]);
        assert_eq!(s.n(), 3);
        assert_eq!(s.distinct(), 2);
        assert_eq!(s.sorted_points().collect::<Vec<_>>(), vec![0.2, 0.2, 0.6]);
        assert_eq!(o.k(1), 2);
        assert!((s.min_gap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn distinct_level_boundary() {
        assert_eq!(distinct_level(f64::INFINITY), 1);
        assert_eq!(distinct_level(0.6), 1);
        // width 1/8 < 0.2 but 1/2 is not
        assert_eq!(distinct_level(0.2), 2);
        for g in [1e-3, 3.3e-5, 1e-7] {
            let nd = distinct_level(g);
            let w = |n: u64| 1.0 / (2.0 * (n * n) as f64);
            assert!(w(nd) < g);
            assert!(w(nd - 1) >= g * GAP_SAFETY);
        }
    }

    #[test]
    fn matches_hash_set_oracle_on_random_samples() {
        let mut rs = RandomStream::new(17, 0);
        for trial in 0..20 {
            let n = 5 + trial * 10;
            let xs = uniform_stream(&mut rs, n);
            let xs: Vec<f64> = xs.into_iter().filter(|&x| x > 0.0).collect();
            let (s, o) = build(&xs);
            assert_eq!(o, OccupancyStats::recompute(&s).unwrap());
            let nd = o.distinct_level();
            for level in 1..=(nd + 20) {
                assert_eq!(o.k(level), oracle_k(&xs, level), "level {level}");
            }
            assert!(1.0 / (2.0 * (nd * nd) as f64) < s.min_gap());
        }
    }

    #[test]
    fn too_close_points_are_rejected_without_corrupting_state() {
        let (mut s, mut o) = build(&[0.5]);
        let close = f64::from_bits(0.5f64.to_bits() + 1);
        let err = update_stats(&mut s, &mut o, close).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert_eq!(s.n(), 1);
        assert_eq!(o.distinct(), 1);
    }

    proptest! {
        #[test]
        fn occupancy_invariants(xs in prop::collection::vec(1e-6f64..0.999999, 1..60)) {
            let mut s = SufficientStats::new();
            let mut o = OccupancyStats::new();
            let mut prev: Option<OccupancyStats> = None;
            for &x in &xs {
                update_stats(&mut s, &mut o, x).unwrap();
                let n = s.n();
                for level in 1..=(o.distinct_level() + 3).min(400) {
                    let k = o.k(level);
                    prop_assert!(k >= 1 && k <= n.min(2 * level * level));
                    if let Some(p) = &prev {
                        prop_assert!(k >= p.k(level));
                    }
                }
                prev = Some(o.clone());
            }
            prop_assert!((s.w_n() * s.n() as f64 - s.s_n()).abs() < 1e-9);
            let sorted: Vec<f64> = s.sorted_points().collect();
            prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(o, OccupancyStats::recompute(&s).unwrap());
        }
    }
}
