//! Counter-derived random streams.
//!
//! A stream is identified by the run seed plus a tuple of tags (batch index,
//! SNR point, trial chunk, ...). The tags are folded through SplitMix64, so
//! each stream is a pure function of its coordinates and parallel workers can
//! pick up any chunk in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn stream(seed: u64, tags: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

/// Fresh seed for runs that did not specify one. Kept below 2^63 so it fits
/// a TOML integer.
pub fn entropy_seed() -> u64 {
    rand::random::<u64>() >> 1
}
