//! Deterministic, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The pair is mixed with the
//! SplitMix64 finalizer into a single 64-bit key, which then seeds a
//! xoshiro256++ generator through its SplitMix64 state expansion.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::numerics::special::inv_norm_cdf;

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: Xoshiro256PlusPlus,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = splitmix_finalize(seed ^ splitmix_finalize(stream_id.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        RandomStream {
            seed,
            stream_id,
            rng: Xoshiro256PlusPlus::seed_from_u64(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Uniform on the open interval `(0, 1)`: the 53-bit lattice shifted by
    /// half a step.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * INV_2_53
    }

    /// Standard normal draw by inversion.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        inv_norm_cdf(self.next_open01()).expect("open-interval uniform")
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-shift with rejection).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (bound as u128);
            let lo = m as u64;
            if lo >= bound.wrapping_neg() % bound {
                return (m >> 64) as u64;
            }
        }
    }
}

/// `n` draws from the uniform distribution on `[0, 1)`.
pub fn uniform_stream(rs: &mut RandomStream, n: usize) -> Vec<f64> {
    (0..n).map(|_| rs.next_f64()).collect()
}
