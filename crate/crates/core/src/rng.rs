//! Seeded randomness.
//!
//! Every random decision in the crate draws from [`ChaCha8Rng`] seeded with
//! `seed_from_u64`, whose output stream is fixed by the ChaCha8 algorithm and
//! the `rand_core` seed expansion (PCG32 over the 64-bit seed). Integers in a
//! range are drawn with [`uniform_below`], which uses plain rejection sampling
//! on `next_u64` so the mapping from stream to value is fully specified here
//! rather than by a library's sampling internals.
//!
//! Sub-seeds are derived with [`derive_seed`]: a SplitMix64 finalizer folded
//! over the master seed and a list of integer tags.

use rand::{RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `tags` into `master`, one SplitMix64 round per tag.
///
/// `derive_seed(s, &[a, b])` differs from `derive_seed(s, &[b, a])` and from
/// `derive_seed(s, &[a])`.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t.wrapping_add(GOLDEN)));
    }
    h
}

/// Uniform integer in `0..bound` by rejection on the top of the 64-bit range.
pub fn uniform_below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below: empty range");
    // Largest multiple of `bound` that fits; values at or above it are redrawn.
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Uniform real in `[0, 1)` from the top 53 bits of one draw.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn random_bits<R: RngCore>(rng: &mut R, len: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(len);
    let mut word = 0u64;
    for i in 0..len {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        out.push(word & 1 == 1);
        word >>= 1;
    }
    out
}

/// Durstenfeld's Fisher–Yates shuffle: for `i` from the last index down to 1,
/// swap element `i` with a uniform index in `0..=i`.
pub fn fisher_yates<T, R: RngCore>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// A uniformly random permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    fisher_yates(&mut p, &mut seeded(seed));
    p
}
