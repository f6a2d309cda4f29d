//! Per-trajectory random streams.
//!
//! Every trajectory `i` of an ensemble with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` with its stream id set to `i`. ChaCha is a
//! counter-based generator with 2^64 independent streams, so the values a
//! trajectory sees depend only on `(s, i)`, never on which worker ran it.

use rand_chacha::rand_core::{RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

/// The generator for trajectory `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform double in the open interval `(0, 1)`.
#[inline]
pub fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Pulls single bits off a generator, 64 at a time.
#[derive(Debug, Clone)]
pub struct BitReader {
    word: u64,
    left: u32,
}

impl Default for BitReader {
    fn default() -> Self {
        Self::new()
    }
}

impl BitReader {
    pub fn new() -> Self {
        Self { word: 0, left: 0 }
    }

    #[inline]
    pub fn bit(&mut self, rng: &mut ChaCha8Rng) -> u64 {
        if self.left == 0 {
            self.word = rng.next_u64();
            self.left = 64;
        }
        let b = self.word & 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }

    /// Number of one bits among the next `count` bits.
    pub fn count_ones(&mut self, rng: &mut ChaCha8Rng, mut count: u64) -> u64 {
        let mut ones = 0u64;
        if self.left > 0 {
            let take = count.min(self.left as u64) as u32;
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            ones += (self.word & mask).count_ones() as u64;
            self.word = if take == 64 { 0 } else { self.word >> take };
            self.left -= take;
            count -= take as u64;
        }
        while count >= 64 {
            ones += rng.next_u64().count_ones() as u64;
            count -= 64;
        }
        if count > 0 {
            let w = rng.next_u64();
            let mask = (1u64 << count) - 1;
            ones += (w & mask).count_ones() as u64;
            self.word = w >> count;
            self.left = 64 - count as u32;
        }
        ones
    }
}
