//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha stream, identified by a
//! 64-bit stream id, so that adding an interval or a trial never perturbs the
//! draws of another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream used to draw the shift of the dynamic algorithm.
pub const STREAM_SHIFT: u64 = 1;
/// Stream used by request generators.
pub const STREAM_GENERATOR: u64 = 2;
/// Stream used to draw random initial colorings.
pub const STREAM_INITIAL: u64 = 3;
const STREAM_INTERVAL_BASE: u64 = 1 << 32;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed, e.g. the seed of trial `index` from a master seed.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index))
}

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn interval_stream(seed: u64, interval: u32) -> StreamRng {
    stream(seed, STREAM_INTERVAL_BASE + interval as u64)
}
