//! Deterministic seed derivation.
//!
//! A single master seed fans out into independent sub-seeds so that each
//! stochastic component (imputation, SMOTE, splitting, neighbor sampling,
//! dropout) can be re-run in isolation and yields identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stable 64-bit FNV-1a hash of a byte string.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a parent seed and a textual tag.
pub fn derive(parent: u64, tag: &str) -> u64 {
    mix(parent ^ mix(fnv1a(tag.as_bytes())))
}

/// Derive a sub-seed from a parent seed and a sequence of integers.
pub fn derive_n(parent: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(parent), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
