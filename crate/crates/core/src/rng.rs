//! Portable seeded randomness.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by
//! `(seed, stream)`: the key is expanded from the 64-bit seed with
//! `SeedableRng::seed_from_u64` and the 64-bit stream id picks an independent
//! keystream. Edge `(i, j)` with `i < j` on `n` vertices reads stream
//! `i * n + j`, so edge weights do not depend on iteration order. Uniform
//! reals take the top 53 bits of one `u64`; bounded integers use rejection
//! sampling on whole `u64` draws.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream reserved for choosing the planted side.
pub const PARTITION_STREAM: u64 = u64::MAX;
/// Stream reserved for jitter and attack sampling on whole graphs.
pub const AUX_STREAM: u64 = u64::MAX - 1;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for the unordered pair `(i, j)`.
pub fn edge_stream(n: usize, i: usize, j: usize) -> u64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    (a as u64) * (n as u64) + b as u64
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, bound)`.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// SplitMix64 finalizer; combines a base seed with tags into a child seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut z = seed;
    for &t in tags {
        z = mix(z ^ mix(t.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    mix(z)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
