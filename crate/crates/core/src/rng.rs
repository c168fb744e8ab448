//! Seeded random streams.
//!
//! Every stochastic component draws from its own ChaCha stream derived from a
//! single global seed and a fixed label, so adding a consumer (another chain,
//! another replication) never perturbs the draws of the existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fixed labels for the streams used by the pipeline.
pub mod label {
    pub const NOISE: u64 = 1;
    pub const DUMMY: u64 = 2;
    pub const REPLICATION: u64 = 3;
    pub const CHAIN: u64 = 4;
}

/// SplitMix64 finaliser over `(seed, label, index)`.
pub fn derive_seed(seed: u64, label: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(label.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
