//! Seeded, platform-independent randomness for sampled checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen()
}
