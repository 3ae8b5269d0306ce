//! Shared test support: random models and vaults, plus reference oracles
//! that recompute expected results without going through the library's own
//! algorithms.

pub mod fixtures;
pub mod models;
pub mod oracles;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
