//! Seeded, splittable randomness.
//!
//! Every random procedure takes a `u64` seed and derives its generator
//! here, so a seed alone pins the whole computation. Independent
//! sub-computations (trials, pairs) use separate ChaCha streams of the
//! same key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-computation `stream` of the master `seed`.
pub fn split(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_add(1));
    rng
}
