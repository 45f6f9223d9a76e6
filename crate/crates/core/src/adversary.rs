//! Adversary strategies and the experiments that operationalize the
//! protocol's security claims: exhaustive binding attacks, Monte-Carlo
//! hiding distinguishers, per-node local hiding, and the post-protocol
//! expungement tradeoff.
//!
//! # The distinguishing game
//!
//! Hiding is estimated through a guessing game with a Bayes-optimal
//! distinguisher over the coalition's classical view (the symbolic backend
//! makes every in-model view classical: known codeword positions plus
//! whatever of z, r, theta the coalition holds). The distinguisher is shown
//! either the run's true commitment or the commitment of an independent run
//! sharing the same public randomness (same extractor seed), and the
//! advantage is 2 Pr[correct] - 1. Comparing against an independent run
//! rather than a raw uniform string keeps extractor-seed degeneracies, which
//! the coalition can compute on its own and which carry no information about
//! the committed value, from registering as advantage; at desk-scale k the
//! degenerate-seed fraction is far from negligible.
//!
//! The classical-view advantage equals the quantum guessing advantage for
//! BB84-diagonal strategies, and is a lower bound in general.

use serde::{Deserialize, Serialize};

use crate::bits::{sample_uniform, BitString};
use crate::code::LinearCode;
use crate::error::EbcError;
use crate::extractor::extract;
use crate::params::{Flag, ProtocolParams};
use crate::protocol::{
    run_commit, run_erase, run_open, AdversaryHooks, CommitState, MeasureResendAttack, NodeSet,
};
use crate::rng::{streams, trial_rng};
use crate::stats::{run_trials, three_sigma_slack, wilson, Proportion, Z_99};

use rand::Rng as _;

const MAX_BINDING_N: usize = 20;
const MAX_BINDING_K: usize = 4;
pub const MIN_TRIALS: usize = 1_000;

/// Which parts of the run a post-protocol coalition holds.
///
/// `leaked_positions` are codeword indices whose encoded value the coalition
/// is granted exactly; this upper-bounds what corrupt nodes can learn from
/// their qubit slices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoalitionSpec {
    pub has_z: bool,
    pub has_r: bool,
    pub has_theta: bool,
    pub leaked_positions: Vec<usize>,
}

impl CoalitionSpec {
    /// Bob alone: (z, r, theta), no qubit positions.
    pub fn bob_only() -> Self {
        Self {
            has_z: true,
            has_r: true,
            has_theta: true,
            leaked_positions: Vec::new(),
        }
    }

    /// Bob plus the slices of the given corrupt nodes.
    pub fn bob_with_nodes(params: &ProtocolParams, corrupt: &[usize]) -> Self {
        Self {
            leaked_positions: node_positions(params, corrupt),
            ..Self::bob_only()
        }
    }

    /// A lone node's view: its slice, none of the classical secrets.
    pub fn single_node(params: &ProtocolParams, node: usize) -> Self {
        Self {
            has_z: false,
            has_r: false,
            has_theta: false,
            leaked_positions: node_positions(params, &[node]),
        }
    }
}

fn node_positions(params: &ProtocolParams, nodes: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = nodes
        .iter()
        .flat_map(|&n| params.node_slice(n))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Monte-Carlo advantage estimate with a 99% Wilson interval on the guess
/// rate and the conservative 3-sigma slack used by acceptance checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub advantage: f64,
    pub guess_rate: Proportion,
    /// 3-sigma sampling slack on `advantage` (twice the guess-rate slack,
    /// since advantage = 2 rate - 1).
    pub three_sigma: f64,
}

/// Exact posterior over the commitment given the coalition's classical
/// knowledge, by enumeration over all 2^k messages.
///
/// Without z, leaked positions say nothing (one-time pad); without r, the
/// extractor output of any nonzero message is uniform over seeds, so only
/// the zero message concentrates mass.
fn commitment_posterior(
    state: &CommitState,
    leaks: &[(usize, u8)],
    has_z: bool,
    has_r: bool,
) -> Vec<f64> {
    let k = state.params.k;
    let ell = state.params.ell;
    let out_dim = 1usize << ell;
    let mut mass = vec![0.0f64; out_dim];
    let mut total = 0.0f64;
    for v in 0u64..1 << k {
        let x = BitString::from_u64(v, k);
        if has_z {
            let y = state.code.encode(&x).expect("length");
            let consistent = leaks
                .iter()
                .all(|&(pos, u_val)| y.bit(pos) == u_val ^ state.z.bit(pos));
            if !consistent {
                continue;
            }
        }
        total += 1.0;
        if has_r {
            let c = extract(&x, &state.r).expect("length");
            mass[c.to_u64() as usize] += 1.0;
        } else if v == 0 {
            mass[0] += 1.0;
        } else {
            for m in mass.iter_mut() {
                *m += 1.0 / out_dim as f64;
            }
        }
    }
    if total > 0.0 {
        for m in mass.iter_mut() {
            *m /= total;
        }
    }
    mass
}

/// One round of the guessing game. Returns whether the Bayes rule guessed
/// correctly.
fn play_game(
    state: &CommitState,
    leaks: &[(usize, u8)],
    spec_has_z: bool,
    spec_has_r: bool,
    rng: &mut crate::rng::Rng,
) -> bool {
    let informed = commitment_posterior(state, leaks, spec_has_z, spec_has_r);
    let baseline = commitment_posterior(state, &[], spec_has_z, spec_has_r);
    let real = rng.gen::<bool>();
    let candidate = if real {
        state.c.clone()
    } else {
        // Independent run with the same public randomness.
        let x_fresh = sample_uniform(state.params.k, rng);
        extract(&x_fresh, &state.r).expect("length")
    };
    let idx = candidate.to_u64() as usize;
    let guess_real = if informed[idx] > baseline[idx] + 1e-12 {
        true
    } else if informed[idx] + 1e-12 < baseline[idx] {
        false
    } else {
        rng.gen::<bool>()
    };
    guess_real == real
}

fn estimate(correct: usize, trials: usize) -> AdvantageEstimate {
    let guess_rate = wilson(correct, trials, Z_99);
    AdvantageEstimate {
        advantage: (2.0 * guess_rate.estimate - 1.0).max(0.0),
        guess_rate,
        three_sigma: 2.0 * three_sigma_slack(trials),
    }
}

/// Phase run before the coalition forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PhaseSelect {
    CommitOnly,
    Erase,
    Open,
}

fn advantage_experiment(
    params: &ProtocolParams,
    code: &LinearCode,
    spec: &CoalitionSpec,
    phase: PhaseSelect,
    trials: usize,
    seed: u64,
) -> Result<AdvantageEstimate, EbcError> {
    if trials < MIN_TRIALS {
        return Err(EbcError::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let hooks = AdversaryHooks::honest();
    let results = run_trials(trials, |trial| {
        let (state, mut transcript) =
            run_commit(params, code, seed, trial, 0.0, &hooks).expect("commit");
        let state = match phase {
            PhaseSelect::CommitOnly => state,
            PhaseSelect::Erase => run_erase(state, &hooks, &mut transcript).expect("erase").1,
            PhaseSelect::Open => run_open(state, &hooks, &mut transcript).expect("open").1,
        };
        let leaks: Vec<(usize, u8)> = spec
            .leaked_positions
            .iter()
            .map(|&pos| {
                // Worst case: the coalition learns the encoded bit exactly.
                (pos, state.committed_y.bit(pos) ^ state.z.bit(pos))
            })
            .collect();
        let mut game_rng = trial_rng(seed, trial, streams::GAME);
        play_game(&state, &leaks, spec.has_z, spec.has_r, &mut game_rng)
    });
    let correct = results.iter().filter(|&&c| c).count();
    Ok(estimate(correct, trials))
}

/// Distinguishing advantage of a coalition formed right after commit.
pub fn hiding_advantage(
    params: &ProtocolParams,
    code: &LinearCode,
    spec: &CoalitionSpec,
    trials: usize,
    seed: u64,
) -> Result<AdvantageEstimate, EbcError> {
    advantage_experiment(params, code, spec, PhaseSelect::CommitOnly, trials, seed)
}

/// Coalition of Bob and all m nodes after an honest erase. Honest nodes
/// returned their slices and contribute nothing; corrupt nodes contribute at
/// most their slice positions.
pub fn erase_hiding_advantage(
    params: &ProtocolParams,
    code: &LinearCode,
    corrupt_nodes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<AdvantageEstimate, EbcError> {
    let spec = CoalitionSpec::bob_with_nodes(params, corrupt_nodes);
    advantage_experiment(params, code, &spec, PhaseSelect::Erase, trials, seed)
}

/// Coalition of all m nodes (without Bob) after an honest open. The opened
/// message went to Bob, so the nodes hold strictly less than in the erase
/// case: only their slice positions, with none of (z, r, theta).
pub fn open_hiding_advantage(
    params: &ProtocolParams,
    code: &LinearCode,
    corrupt_nodes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<AdvantageEstimate, EbcError> {
    let spec = CoalitionSpec {
        has_z: false,
        has_r: false,
        has_theta: false,
        leaked_positions: node_positions(params, corrupt_nodes),
    };
    advantage_experiment(params, code, &spec, PhaseSelect::Open, trials, seed)
}

/// Advantage of a single honest-but-curious node's view after commit. With
/// `leak_z` the node is additionally handed z, an out-of-model contrast that
/// turns its slice into a direct codeword leak.
pub fn local_hiding_check(
    params: &ProtocolParams,
    code: &LinearCode,
    node_index: usize,
    leak_z: bool,
    trials: usize,
    seed: u64,
) -> Result<AdvantageEstimate, EbcError> {
    let spec = CoalitionSpec {
        has_z: leak_z,
        ..CoalitionSpec::single_node(params, node_index)
    };
    advantage_experiment(params, code, &spec, PhaseSelect::CommitOnly, trials, seed)
}

/// Result of an exhaustive binding search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    /// Maximum probability, over all enumerated strategies, of Bob accepting
    /// an opening that differs from the simulator-defined committed value.
    /// Deterministic at desk scale: 0 or 1.
    pub max_equivocation: f64,
    /// Maximum over commit strings of the number of distinct openable
    /// messages; the weak-binding sum is bounded by this count.
    pub max_openable: usize,
    pub commit_strings: u64,
    /// A successful (commit string, message pair) witness when equivocation
    /// is possible.
    pub witness: Option<(BitString, BitString, BitString)>,
}

/// Enumerate every commit string y_tilde, every flip pattern of weight at
/// most `budget` applied at open, and every openable message, against the
/// simulator-defined committed value (the codeword closest to y_tilde, ties
/// to the lowest message).
///
/// `threshold_override` replaces the acceptance threshold for
/// counter-experiments that break the distance geometry on purpose.
pub fn binding_attack_exhaustive(
    params: &ProtocolParams,
    code: &LinearCode,
    budget: usize,
    threshold_override: Option<usize>,
) -> Result<BindingReport, EbcError> {
    let n = params.n;
    let k = params.k;
    if n > MAX_BINDING_N || k > MAX_BINDING_K {
        return Err(EbcError::BudgetExceeded(format!(
            "exhaustive binding needs n <= {MAX_BINDING_N}, k <= {MAX_BINDING_K}; got n = {n}, k = {k}"
        )));
    }
    let threshold = threshold_override.unwrap_or_else(|| params.accept_threshold());
    let codewords: Vec<u64> = code
        .codewords()
        .map(|(_, y)| y.to_u64())
        .collect();
    let flip_masks = masks_up_to_weight(n, budget);

    let per_commit = run_trials(1usize << n, |y_tilde| {
        // Simulator-defined committed message: closest codeword.
        let sim = codewords
            .iter()
            .enumerate()
            .min_by_key(|(i, &cw)| ((y_tilde ^ cw).count_ones(), *i))
            .map(|(i, _)| i)
            .unwrap();
        let mut openable = 0usize;
        let mut equivocates = None;
        for (x, &cw) in codewords.iter().enumerate() {
            let reachable = flip_masks
                .iter()
                .any(|&e| ((y_tilde ^ e) ^ cw).count_ones() as usize <= threshold);
            if reachable {
                openable += 1;
                if x != sim {
                    equivocates = Some(x);
                }
            }
        }
        (openable, equivocates, sim)
    });

    let max_openable = per_commit.iter().map(|(o, _, _)| *o).max().unwrap_or(0);
    let witness = per_commit.iter().enumerate().find_map(|(y, (_, eq, sim))| {
        eq.map(|x| {
            (
                BitString::from_u64(y as u64, n),
                BitString::from_u64(x as u64, k),
                BitString::from_u64(*sim as u64, k),
            )
        })
    });
    Ok(BindingReport {
        max_equivocation: if witness.is_some() { 1.0 } else { 0.0 },
        max_openable,
        commit_strings: 1 << n,
        witness,
    })
}

fn masks_up_to_weight(n: usize, budget: usize) -> Vec<u64> {
    (0u64..1 << n)
        .filter(|m| (m.count_ones() as usize) <= budget)
        .collect()
}

/// Outcome of the all-nodes measure-and-resend expungement attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpungementReport {
    pub accept: Proportion,
    /// Post-hoc coalition advantage once theta and z are revealed to the
    /// nodes, using their retained measurement records.
    pub advantage: AdvantageEstimate,
    /// Mean fraction of node measurements that landed in the preparation
    /// basis (the only informative ones).
    pub matched_fraction: f64,
}

/// All nodes measure a fraction of their qubits in fresh random bases before
/// returning them at erase, keeping the records; they receive nothing from
/// Bob. Reports Alice's acceptance rate and the coalition's advantage with
/// (theta, z) revealed afterwards.
pub fn expungement_attack_run(
    params: &ProtocolParams,
    code: &LinearCode,
    fraction: f64,
    trials: usize,
    seed: u64,
) -> Result<ExpungementReport, EbcError> {
    if trials < MIN_TRIALS {
        return Err(EbcError::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let hooks = AdversaryHooks {
        node_measure_resend: Some(MeasureResendAttack {
            nodes: NodeSet::All,
            fraction,
        }),
        ..Default::default()
    };
    let results = run_trials(trials, |trial| {
        let (state, mut transcript) =
            run_commit(params, code, seed, trial, 0.0, &hooks).expect("commit");
        let (outcome, state) = run_erase(state, &hooks, &mut transcript).expect("erase");
        let accepted = outcome.flag_a == Flag::Erase;
        // A record is informative only when its basis matched theta; the
        // outcome then equals the encoded bit.
        let mut leaks = Vec::new();
        let mut measured = 0usize;
        for log in &state.node_logs {
            for &(pos, basis, out) in &log.measurements {
                measured += 1;
                if basis == state.theta.bit(pos) {
                    leaks.push((pos, out));
                }
            }
        }
        let matched = leaks.len();
        let mut game_rng = trial_rng(seed, trial, streams::GAME);
        let correct = play_game(&state, &leaks, true, false, &mut game_rng);
        (accepted, correct, matched, measured)
    });
    let accepted = results.iter().filter(|r| r.0).count();
    let correct = results.iter().filter(|r| r.1).count();
    let matched: usize = results.iter().map(|r| r.2).sum();
    let measured: usize = results.iter().map(|r| r.3).sum();
    Ok(ExpungementReport {
        accept: wilson(accepted, trials, Z_99),
        advantage: estimate(correct, trials),
        matched_fraction: if measured == 0 {
            0.0
        } else {
            matched as f64 / measured as f64
        },
    })
}
