//! Portable seeded randomness.
//!
//! Every random draw in the crate goes through [`SeededRng`], a thin wrapper
//! over xoshiro256++ seeded with SplitMix64 expansion of a 64-bit seed. The
//! conversions on top of the raw `u64` stream are fixed here so that another
//! implementation can reproduce the same draws:
//!
//! * `uniform()`: `(next_u64 >> 11) * 2^-53`, a value in `[0, 1)`.
//! * `below(n)`: the high 64 bits of `next_u64 * n` (128-bit product).
//! * `normal()`: Box-Muller with `u1 = 1 - uniform()` and `u2 = uniform()`,
//!   returning `sqrt(-2 ln u1) * cos(2 pi u2)`; one normal per two draws.
//! * `shuffle`: Fisher-Yates from the last index down, `j = below(i + 1)`.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `count` distinct indices from `0..n`, in draw order (partial Fisher-Yates).
    pub fn sample_indices(&mut self, n: usize, count: usize) -> Vec<usize> {
        let count = count.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Derives a 64-bit seed from a list of string/integer parts.
///
/// FNV-1a over the parts, each part encoded as its UTF-8 bytes followed by a
/// `0xff` separator, then finished with the SplitMix64 mixer so nearby inputs
/// give unrelated seeds.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let mut h = FNV_OFFSET;
    for part in parts {
        for &b in part.as_bytes().iter().chain(std::iter::once(&0xffu8)) {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    splitmix_finalize(h)
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
