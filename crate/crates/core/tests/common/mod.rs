//! Brute-force oracle for the step half: every member of `F₁` and `F₂`
//! (2 + 70 densities) is built explicitly and its likelihood multiplied out.

#![allow(dead_code)]

use posterior_lab::barron::{step_partial_sum, update_stats, OccupancyStats, SufficientStats};
use posterior_lab::density::{step_pdf, StepDensity};

fn combinations(n: u64, k: usize) -> Vec<Vec<u64>> {
    fn rec(start: u64, n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn brute_force(xs: &[f64], with_likelihood: bool) -> f64 {
    let mut total = 0.0;
    let mut members = 0;
    for level in 1..=2u64 {
        let half = level * level;
        let subsets = combinations(2 * half, half as usize);
        let weight = 6.0 / (std::f64::consts::PI.powi(2) * half as f64) / subsets.len() as f64;
        for sel in subsets {
            members += 1;
            let d = StepDensity::new(level, sel).unwrap();
            let lik: f64 = xs.iter().map(|&x| step_pdf(&d, x).unwrap()).product();
            let consistent = if lik > 0.0 { 1.0 } else { 0.0 };
            total += weight * if with_likelihood { lik } else { consistent };
        }
    }
    assert_eq!(members, 72);
    total.ln()
}

pub fn engine_sum(xs: &[f64], with_likelihood: bool) -> f64 {
    let mut s = SufficientStats::new();
    let mut o = OccupancyStats::new();
    for &x in xs {
        update_stats(&mut s, &mut o, x).unwrap();
    }
    step_partial_sum(&o, s.n(), with_likelihood, 1..=2).unwrap().ln()
}

/// Every member of `F₁ ∪ F₂`.
pub fn small_step_densities() -> Vec<StepDensity> {
    (1..=2u64)
        .flat_map(|level| {
            combinations(2 * level * level, (level * level) as usize)
                .into_iter()
                .map(move |sel| StepDensity::new(level, sel).unwrap())
        })
        .collect()
}
