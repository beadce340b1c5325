//! Seeded random number generation.
//!
//! All estimators take an explicit seed. The generator is ChaCha8, a
//! counter-based stream cipher, so a `(seed, m)` pair always reproduces the
//! same draws bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}
