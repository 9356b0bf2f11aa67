//! Reproducible random streams.
//!
//! Every replication owns an independent ChaCha8 stream selected from a
//! master seed and a replication index. Decisions that must not depend on
//! iteration order (per-pair retention, per-edge thinning) use a stateless
//! counter-based draw keyed by a 64-bit key and the pair of vertex ids.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The concrete generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `master`.
///
/// `mix64(mix64(master) ^ mix64(index ^ 0xA5A5...))`: distinct indices give
/// unrelated seeds and the value never depends on how many other
/// replications exist or in which order they run.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index ^ 0xA5A5_A5A5_A5A5_A5A5))
}

/// Generator for replication `index` of a run seeded with `master`.
pub fn replication_rng(master: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, index))
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Counter-based uniform draw in `[0, 1)` keyed by `(key, a, b)`.
#[inline]
pub fn keyed_uniform(key: u64, a: u64, b: u64) -> f64 {
    let h = mix64(key ^ mix64(a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ mix64(b)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws a fresh key for counter-based decisions from a stream.
pub fn draw_key<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    rng.next_u64()
}
