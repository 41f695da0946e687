//! Seeded random streams.
//!
//! Every random decision in an experiment draws from a ChaCha8 stream keyed by
//! the run seed plus a fixed stream id, so reordering one consumer never
//! perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream ids used by the harness.
pub mod stream {
    pub const INIT: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const SCHEDULE: u64 = 3;
    pub const SELECTION: u64 = 4;
    pub const BLOBS: u64 = 5;
    pub const REMOVED: u64 = 6;
}

pub fn rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a phase counter into a seed (splitmix64 finaliser).
pub fn derive(seed: u64, phase: u64) -> u64 {
    let mut z = seed ^ phase.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
