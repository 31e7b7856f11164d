//! Reproducible random draws.
//!
//! Every stochastic component draws from xoshiro256** seeded through
//! SplitMix64 (`Xoshiro256StarStar::seed_from_u64`). A uniform draw is
//! `(next_u64 >> 11) * 2^-53`, and a Bernoulli(p) draw is `uniform < p`, so
//! p = 0 never fires and p = 1 always fires. Sequences depend only on the
//! seed and are identical across platforms.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct StreamRng(Xoshiro256StarStar);

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of indices:
/// `s <- splitmix64(s ^ splitmix64(i))` for each index in turn.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(master, |s, &i| splitmix64(s ^ splitmix64(i)))
}
