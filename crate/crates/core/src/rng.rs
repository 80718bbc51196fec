//! Seeded randomness with a pinned algorithm.
//!
//! Every random object in the crate is drawn from a ChaCha8 stream whose 32-byte
//! key comes from SplitMix64 applied to a derived 64-bit seed. Child seeds are
//! derived as `derive_seed(master, path)`, folding each path component through
//! SplitMix64. Bounded integers use rejection sampling on `next_u64`, and
//! permutations use descending Fisher-Yates. None of this depends on `rand`'s
//! distribution code, so outputs stay fixed across dependency upgrades.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng as Stream;

/// Identifier recorded in reports so readers know which generator produced them.
pub const RNG_ID: &str = "chacha8+splitmix64/v1";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a labelled sub-stream, e.g. `derive_seed(seed, &[MATCHING, j])`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &p in path {
        state = out ^ p.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        out = splitmix64(&mut state);
    }
    out
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

pub fn derived_stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    stream(derive_seed(master, path))
}

/// Uniform integer in `[0, n)`. Panics if `n == 0`.
pub fn uniform_below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0, "uniform_below(0)");
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

pub fn shuffle<T, R: RngCore>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Uniformly random permutation of `0..n` as an image vector.
pub fn permutation<R: RngCore>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    shuffle(rng, &mut p);
    p
}

/// Uniform `k`-subset of `0..n`, returned sorted (partial Fisher-Yates).
pub fn sample_subset<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + uniform_below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut out = pool[..k].to_vec();
    out.sort_unstable();
    out
}

pub fn coin<R: RngCore>(rng: &mut R) -> bool {
    rng.next_u64() & 1 == 1
}
