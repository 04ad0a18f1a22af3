//! Seed derivation.
//!
//! Every random stream is derived from one root seed by hashing the parent
//! seed with a stream label, so the draw sequence of one stream never
//! depends on how many values another stream consumed or on thread
//! scheduling:
//!
//! ```text
//! episode seed
//! ├── chunk c ── sampler stream (initial noise, proposals, resampling)
//! │           └── perturbation stream (margin term during planning)
//! └── step t ─── perturbation stream (margin term of the executed pose)
//! ```
//!
//! Candidate scoring draws nothing: the perturbation seed is shared by all
//! candidates of a chunk, so values are pure functions of the candidates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_CHUNK: u64 = 0x4348_554e_4b00_0000;
pub const STREAM_STEP: u64 = 0x5354_4550_0000_0000;
pub const STREAM_SAMPLER: u64 = 0x5341_4d50;
pub const STREAM_PERTURB: u64 = 0x5045_5254;

/// The splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `stream` under `parent`.
pub fn derive(parent: u64, stream: u64) -> u64 {
    splitmix64(parent ^ splitmix64(stream))
}

pub fn chunk_seed(episode: u64, chunk: usize) -> u64 {
    derive(episode, STREAM_CHUNK ^ chunk as u64)
}

pub fn step_seed(episode: u64, t: usize) -> u64 {
    derive(episode, STREAM_STEP ^ t as u64)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
