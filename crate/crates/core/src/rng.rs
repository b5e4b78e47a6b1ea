//! Seeded randomness and stable hashing.
//!
//! Every stochastic step in the crate draws from a ChaCha20 stream seeded
//! through [`derive_seed`], so independent components (subsampling,
//! splitting, initialization, shuffling) get decorrelated streams from one
//! master seed while staying reproducible across platforms and runs.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::math;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// 64-bit FNV-1a over a byte string. Used for seed derivation, feature
/// hashing, and content fingerprints; the algorithm is fixed so hashes are
/// stable across compiler and library versions.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// FNV-1a continued from a prior state, for hashing composite keys
/// without allocating.
pub fn fnv1a64_update(state: u64, bytes: &[u8]) -> u64 {
    let mut h = state;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 finalizer; scrambles FNV output into a well-mixed seed.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a textual role tag.
/// Different tags give decorrelated streams; the same pair always gives
/// the same seed.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    splitmix64(master ^ fnv1a64(tag.as_bytes()))
}

/// A ChaCha20 generator for the given seed.
pub fn seeded(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One draw from the standard normal distribution via the Box-Muller
/// transform (cosine branch). Implemented directly so the stream is
/// identical on every platform.
pub fn standard_normal(rng: &mut ChaCha20Rng) -> f64 {
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(rng: &mut ChaCha20Rng, items: &mut [T]) {
    if items.len() < 2 {
        return;
    }
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// `k` distinct indices drawn without replacement from `0..n`, in
/// selection order. Panics if `k > n`.
pub fn sample_indices(rng: &mut ChaCha20Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} of {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Hex rendering of a 64-bit fingerprint, fixed width 16.
pub fn hex16(h: u64) -> String {
    use core::fmt::Write;
    let mut s = String::with_capacity(16);
    let _ = write!(s, "{h:016x}");
    s
}
