//! The one pseudo-random source used for instance generation.
//!
//! Algorithm: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded with
//! `SeedableRng::seed_from_u64`. Bounded integers are drawn by rejection:
//! with `span = hi - lo + 1` and `zone = floor(2^64 / span) * span` (computed as
//! `(u64::MAX / span) * span`), 64-bit outputs `x >= zone` are discarded and
//! the result is `lo + x % span`. Per-trial seeds come from
//! [`derive_seed`]: the master seed selects the key, the trial index selects
//! the ChaCha stream, and the first 64-bit output is the trial seed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn uniform_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = u64::from(hi - lo) + 1;
        let zone = (u64::MAX / span) * span;
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return lo + (x % span) as u32;
            }
        }
    }
}

/// Seed for trial `index` under `master`, reproducible in isolation.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}
