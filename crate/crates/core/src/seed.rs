//! Deterministic seed derivation.
//!
//! Every chain and simulated sequence gets its own generator seeded from the
//! master seed, so work can be split across threads in any order and still
//! reproduce bit-identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all sampling in this crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a list of words.
pub fn hash_words(words: &[u64]) -> u64 {
    let mut h = splitmix64(words.len() as u64);
    for &w in words {
        h = splitmix64(h ^ w);
    }
    h
}

/// `base XOR hash(subset, tag)`.
pub fn derive_seed(base: u64, subset: &[usize], tag: u64) -> u64 {
    let mut words: alloc::vec::Vec<u64> = subset.iter().map(|&i| i as u64).collect();
    words.push(tag);
    base ^ hash_words(&words)
}
