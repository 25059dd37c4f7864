//! Reproducible random streams.
//!
//! Every Monte Carlo chunk draws from its own ChaCha stream keyed by the
//! scenario seed and the chunk index, so results do not depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer, used to decorrelate user seeds and stream labels.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the family labelled `(seed, label)`.
pub fn stream(seed: u64, label: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(label)));
    rng.set_stream(index);
    rng
}
