//! Desk-scale simulator, attack harness, and security-bound analyzer for an
//! erasable bit commitment protocol running over BB84 states held by
//! temporarily trusted nodes.
//!
//! A commitment is a short string extracted from a random codeword; the
//! codeword, one-time-padded and encoded in random BB84 bases, is split
//! across m trusted nodes. Opening routes the qubits to Bob, erasing routes
//! them back to Alice; either way the commitment survives any later
//! coalition of the remaining parties, which is what the harness and bound
//! calculators quantify.

pub mod analysis;
pub mod adversary;
pub mod baselines;
pub mod bits;
pub mod code;
pub mod error;
pub mod extractor;
pub mod params;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod stats;

pub use bits::{hamming_distance, sample_uniform, BitString};
pub use code::{gv_feasible, min_distance, search_random_code, LinearCode};
pub use error::EbcError;
pub use extractor::{extract, leftover_hash_epsilon, ToeplitzSeed};
pub use params::{Flag, ProtocolParams, ValidationReport};
pub use protocol::{run_commit, run_erase, run_open, AdversaryHooks, CommitState, Transcript};
