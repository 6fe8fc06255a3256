//! Deterministic, platform-independent randomness.
//!
//! All sampling in this crate goes through [`ChaCha8Rng`], a fixed counter
//! based stream cipher whose output is identical on every platform. Distinct
//! random streams (one per Monte Carlo trial, one per graph sample, ...) are
//! derived from a base seed and a stream index with [`derive_seed`], the
//! SplitMix64 sequence. Records therefore need to store only the base seed
//! and an index to be replayable.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// The `index`-th output of the SplitMix64 generator seeded with `base`.
///
/// Used as a one-way mix so that nearby (base, index) pairs produce unrelated
/// ChaCha seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A ChaCha8 stream for the given base seed and stream index.
pub fn stream(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, index))
}

/// A ChaCha8 stream seeded directly (stream index 0 convention).
pub fn from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
