//! Seeded randomness.
//!
//! Every random quantity in the crate is drawn from a [`ChaCha8Rng`] stream
//! keyed by a 64-bit seed. ChaCha is a counter-based generator with a fixed
//! output specification, so a seed reproduces the same stream on every
//! platform. Independent sub-streams (one per Monte-Carlo trial, one per
//! stage of a pipeline) are keyed by [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Creates the generator for `seed`.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a master seed with a counter into a child seed.
///
/// Uses two rounds of the SplitMix64 finalizer, so neighbouring counters
/// produce unrelated child seeds and the map is a bijection in `index` for a
/// fixed `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1));
    z = splitmix(z);
    splitmix(z ^ index.rotate_left(32))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Named sub-stream identifiers, so call sites never collide by accident.
pub mod stream {
    pub const LABEL: u64 = 0x10;
    pub const TRAINING: u64 = 0x20;
    pub const CLEAN_SAMPLES: u64 = 0x30;
    pub const PROBE: u64 = 0x40;
    pub const DETECTOR: u64 = 0x50;
    pub const TEST_SET: u64 = 0x60;
    pub const POISON: u64 = 0x70;
}
