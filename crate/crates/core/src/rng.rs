//! Reproducible randomness.
//!
//! One master seed per run. Every consumer gets its own ChaCha stream,
//! addressed by a counter, so adding a consumer never perturbs the draws of
//! the others and identical (seed, config) pairs replay identical runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream ids for the protocol engine. Per-trial consumers add the trial
/// index scaled by `TRIAL_STRIDE` to keep streams disjoint.
pub mod streams {
    pub const ALICE: u64 = 0;
    pub const BOB: u64 = 1;
    pub const CHANNEL: u64 = 2;
    pub const ADVERSARY: u64 = 3;
    pub const GAME: u64 = 4;
    pub const TRUSTED_BASE: u64 = 16;
    pub const TRIAL_STRIDE: u64 = 1024;
}

pub fn master_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// RNG for consumer `stream` inside trial `trial` of a multi-trial experiment.
pub fn trial_rng(seed: u64, trial: u64, stream: u64) -> Rng {
    debug_assert!(stream < streams::TRIAL_STRIDE);
    master_rng(seed, trial.wrapping_mul(streams::TRIAL_STRIDE).wrapping_add(stream))
}
