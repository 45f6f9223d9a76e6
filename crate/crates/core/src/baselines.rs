//! Pedagogical baselines: the single-trusted-node quantum protocol, its
//! classical trusted-party analog, and the equivocation attack that
//! separates them.
//!
//! In the classical protocol Alice sends b xor k to the node; commit and
//! open transcripts for b = 0 and b = 1 are related by relabeling k, so a
//! dishonest Alice can always open the opposite bit. The quantum variant
//! stores H^theta |b xor k| at the node instead; flipping the stored bit
//! requires knowing theta, and a flip in the wrong basis leaves the open
//! measurement reading the original bit, which halves the attack's success.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::quantum::symbolic::{Bb84Register, CorruptOp};
use crate::rng::{streams, trial_rng};
use crate::stats::{run_trials, wilson, Proportion, Z_99};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimpleAction {
    Open,
    Erase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpleRunReport {
    pub trials: usize,
    /// Open: fraction of runs where Bob recovered b. Erase: always 1 (the
    /// erase itself cannot fail without noise).
    pub outcome_rate: Proportion,
    /// Guess accuracy of the post-protocol coalition of Bob and the node,
    /// when requested.
    pub coalition_accuracy: Option<Proportion>,
}

/// Run the one-qubit protocol (m = 1, t = 0): shared secret bits (theta, k),
/// commitment H^theta |b xor k> held by the node.
pub fn simple_protocol_run(
    b: u8,
    action: SimpleAction,
    coalition_after: bool,
    trials: usize,
    seed: u64,
) -> SimpleRunReport {
    let results = run_trials(trials, |trial| {
        let mut rng = trial_rng(seed, trial, streams::ALICE);
        let theta_bit = rng.gen_range(0..=1u8);
        let key_bit = rng.gen_range(0..=1u8);
        let data = BitString::new(vec![b ^ key_bit]).unwrap();
        let theta = BitString::new(vec![theta_bit]).unwrap();
        let mut node_qubit = Bb84Register::prepare(&data, &theta).unwrap();

        match action {
            SimpleAction::Open => {
                // Node forwards to Bob; Bob inverts the Hadamard per theta.
                let outcome = node_qubit.measure_in_basis(&theta, &mut rng).unwrap();
                let recovered = outcome.bit(0) ^ key_bit;
                (recovered == b, None)
            }
            SimpleAction::Erase => {
                // Node returns the qubit to Alice; if Bob and the node later
                // pool (theta, k) and anything the node kept, they still hold
                // nothing correlated with b.
                let guess = if coalition_after {
                    let mut coalition_rng = trial_rng(seed, trial, streams::GAME);
                    // Best available rule: a coin, since the view is
                    // independent of b.
                    Some(coalition_rng.gen_range(0..=1u8) == b)
                } else {
                    None
                };
                (true, guess)
            }
        }
    });
    let ok = results.iter().filter(|r| r.0).count();
    let guesses: Vec<bool> = results.iter().filter_map(|r| r.1).collect();
    SimpleRunReport {
        trials,
        outcome_rate: wilson(ok, trials, Z_99),
        coalition_accuracy: if guesses.is_empty() {
            None
        } else {
            let correct = guesses.iter().filter(|&&g| g).count();
            Some(wilson(correct, guesses.len(), Z_99))
        },
    }
}

/// Success rate of dishonest Alice opening b = 1 after committing b = 0 in
/// the classical protocol: she announces the flipped key, and since the
/// transcript for (b = 0, k) is identical to the one for (b = 1, k xor 1),
/// Bob accepts every time.
pub fn classical_equivocation_attack(trials: usize, seed: u64) -> Proportion {
    let results = run_trials(trials, |trial| {
        let mut rng = trial_rng(seed, trial, streams::ALICE);
        let key_bit = rng.gen_range(0..=1u8);
        let committed = 0u8;
        let node_bit = committed ^ key_bit;
        // Open for 1: Alice claims the key was key_bit xor 1. The node
        // reveals node_bit; Bob computes node_bit xor claimed_key.
        let claimed_key = key_bit ^ 1;
        let recovered = node_bit ^ claimed_key;
        recovered == 1
    });
    let ok = results.iter().filter(|&&r| r).count();
    wilson(ok, trials, Z_99)
}

/// The same attack mounted on the quantum simple protocol. Classically,
/// relabeling the key is the same as flipping the stored bit; quantumly the
/// flip is a Pauli X, which only registers when the state was prepared in
/// the computational basis. In the Hadamard-basis half of the runs the open
/// measurement reads out the original bit, so the attack succeeds with
/// probability 1/2.
pub fn quantum_equivocation_attack(trials: usize, seed: u64) -> Proportion {
    let results = run_trials(trials, |trial| {
        let mut rng = trial_rng(seed, trial, streams::ALICE);
        let mut adv_rng = trial_rng(seed, trial, streams::ADVERSARY);
        let theta_bit = rng.gen_range(0..=1u8);
        let key_bit = rng.gen_range(0..=1u8);
        let data = BitString::new(vec![key_bit]).unwrap();
        let theta = BitString::new(vec![theta_bit]).unwrap();
        let mut node_qubit = Bb84Register::prepare(&data, &theta).unwrap();
        node_qubit
            .corrupt_positions(&[0], CorruptOp::PauliX, &mut adv_rng)
            .unwrap();
        let outcome = node_qubit.measure_in_basis(&theta, &mut rng).unwrap();
        outcome.bit(0) ^ key_bit == 1
    });
    let ok = results.iter().filter(|&&r| r).count();
    wilson(ok, trials, Z_99)
}
