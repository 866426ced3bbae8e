//! Seed derivation for independent, schedule-free random streams.
//!
//! Every stochastic operation takes one master seed and derives a
//! sub-stream per logical coordinate (replicate, grid cell, unit).
//! Derivation is a fixed mixing function, so results do not depend on
//! evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer; full avalanche on 64 bits.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a master seed and a stream coordinate path.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = mix(master ^ 0x6c61_7072_6574_0001);
    for &p in path {
        state = mix(state ^ mix(p));
    }
    state
}

/// A deterministic RNG for the stream identified by `path` under `master`.
pub fn stream(master: u64, path: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master, path))
}

/// Stable 64-bit tag for string labels used in stream paths.
pub fn label(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
