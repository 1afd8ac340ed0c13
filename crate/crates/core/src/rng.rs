//! Reproducible random streams.
//!
//! Every random draw comes from ChaCha8 keyed by the run seed (expanded with
//! `SeedableRng::seed_from_u64`), with the ChaCha stream selected by the shot
//! index. Shots are therefore independent and can run in any order or in
//! parallel without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Algorithm identifier recorded in every [`RunResult`](crate::RunResult).
pub const RNG_ID: &str = "chacha8/seed_from_u64/stream=shot";

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
