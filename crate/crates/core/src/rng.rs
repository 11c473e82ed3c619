//! Deterministic pseudo-random generation. The heavy lifting is a ChaCha
//! stream (reproducible across platforms); `SplitMix` is a tiny splitter
//! for seeding independent sub-streams.

use rand_core::{RngCore, SeedableRng};

/// Deterministic RNG used throughout the generators and samplers.
pub struct KernelRng(rand_chacha::ChaCha8Rng);

impl KernelRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        KernelRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw in `0..n` (n > 0).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Bernoulli draw with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next_u64() % den < num
    }
}

/// SplitMix64, for cheap seed derivation.
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
