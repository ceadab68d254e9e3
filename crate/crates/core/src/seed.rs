//! Seed streams.
//!
//! Every trial draws from its own generator whose seed is a SplitMix64 hash of
//! `(master_seed, index)`. Trials can therefore run in any order, on any
//! number of threads, and each one can be replayed in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th stream derived from `master`.
pub fn split(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(GOLDEN))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for stream `index` of `master`.
pub fn stream(master: u64, index: u64) -> Rng {
    rng(split(master, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn split_is_deterministic_and_distinct() {
        assert_eq!(split(42, 7), split(42, 7));
        let seeds: HashSet<u64> = (0..10_000).map(|i| split(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(split(1, 0), split(2, 0));
    }
}
