//! Three-phase protocol engine: commit, open, erase.
//!
//! One run is one single-threaded, lock-step event loop over simulated
//! private authenticated pairwise channels plus a broadcast channel. Rounds
//! end with a broadcast end-of-step marker. Trusted nodes store and forward
//! qubit slices without touching them (perfectly honest-but-curious
//! behavior); any malformed payload they receive is publicly announced.
//!
//! Channel noise is a depolarizing channel applied on the Alice-to-node leg
//! during distribution.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::{hamming_distance, sample_uniform, BitString};
use crate::code::LinearCode;
use crate::error::EbcError;
use crate::extractor::{extract, ToeplitzSeed};
use crate::params::{Flag, ProtocolParams};
use crate::quantum::symbolic::{Bb84Register, CorruptOp};
use crate::rng::{streams, trial_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartyId {
    Alice,
    Bob,
    Trusted(usize),
}

impl std::fmt::Display for PartyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PartyId::Alice => write!(f, "A"),
            PartyId::Bob => write!(f, "B"),
            PartyId::Trusted(i) => write!(f, "T{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Destination {
    Party(PartyId),
    Broadcast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    ClassicalPrivate,
    Qubits,
    Broadcast,
}

/// One transcript record. Payload content is reduced to a digest; full
/// payloads live in the parties' private views.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub step: u32,
    pub from: PartyId,
    pub to: Destination,
    pub kind: MessageKind,
    pub label: String,
    pub payload_digest: String,
}

fn digest(payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    hex_prefix(&hasher.finalize())
}

fn hex_prefix(bytes: &[u8]) -> String {
    bytes[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Append-only record of one run: messages, public deviation announcements,
/// and phase outcomes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub deviations: Vec<String>,
    pub commitment: Option<BitString>,
    pub opened: Option<BitString>,
    pub flag_a: Option<Flag>,
    pub flag_b: Option<Flag>,
    step: u32,
}

impl Transcript {
    fn record(
        &mut self,
        from: PartyId,
        to: Destination,
        kind: MessageKind,
        label: &str,
        payload: &str,
    ) {
        self.messages.push(Message {
            step: self.step,
            from,
            to,
            kind,
            label: label.to_string(),
            payload_digest: digest(payload),
        });
    }

    fn end_step(&mut self, marker_from: PartyId) {
        self.record(
            marker_from,
            Destination::Broadcast,
            MessageKind::Broadcast,
            "end-of-step",
            "",
        );
        self.step += 1;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

/// Which nodes an attack hook applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeSet {
    Corrupt,
    All,
}

/// Measure-and-resend attack mounted by nodes on their own slices before the
/// slices leave them at open or erase. Each node measures a fraction of its
/// positions in fresh random bases and keeps the records.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureResendAttack {
    pub nodes: NodeSet,
    pub fraction: f64,
}

/// Pluggable adversary behavior. Default is fully honest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdversaryHooks {
    /// Dishonest node set E. Validation of |E| <= t is the harness's job;
    /// the engine executes whatever it is given.
    pub corrupt_nodes: Vec<usize>,
    /// Dishonest Alice commits to an arbitrary string instead of a codeword:
    /// the register encodes y_tilde xor z rather than Enc(x) xor z.
    pub commit_y_override: Option<BitString>,
    /// Corrupt nodes replace their slice with fresh uniform BB84 states on
    /// receipt (quantum-internal deviation; not a payload-shape violation).
    pub commit_replace_slices: bool,
    /// Alice sends this node one qubit too many, triggering the public
    /// deviation announcement.
    pub oversized_payload_to: Option<usize>,
    /// Dishonest Alice opens x_tilde instead of x.
    pub open_substitute_x: Option<BitString>,
    /// Bit flips applied by corrupt nodes to these global positions before
    /// forwarding at open. Positions outside corrupt slices are ignored.
    pub open_flip_positions: Vec<usize>,
    /// Measure-and-resend by nodes before slices leave them (open or erase).
    pub node_measure_resend: Option<MeasureResendAttack>,
}

impl AdversaryHooks {
    pub fn honest() -> Self {
        Self::default()
    }

    fn is_corrupt(&self, node: usize) -> bool {
        self.corrupt_nodes.contains(&node)
    }
}

/// Classical metadata a curious node legitimately retains, plus the
/// measurement records of attacking nodes. Input to coalition analysis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeLog {
    pub slice_start: usize,
    pub slice_len: usize,
    pub received_step: u32,
    /// (global position, basis, outcome) for every qubit this node measured.
    pub measurements: Vec<(usize, u8, u8)>,
}

/// State after a completed commit phase.
#[derive(Clone, Debug)]
pub struct CommitState {
    pub params: ProtocolParams,
    pub code: LinearCode,
    pub seed: u64,
    pub trial: u64,
    /// Alice's private commit data.
    pub x: BitString,
    pub z: BitString,
    pub theta: BitString,
    pub r: ToeplitzSeed,
    pub c: BitString,
    /// The string actually encoded in the register (Enc(x), or the
    /// dishonest override).
    pub committed_y: BitString,
    /// Qubit slice held by each node. Conservation invariant: the slices
    /// partition [n]; a qubit is owned by exactly one register.
    pub node_regs: Vec<Bb84Register>,
    pub node_logs: Vec<NodeLog>,
}

/// Run the commit phase. `channel_eps` is the depolarizing rate of the
/// quantum channels; `trial` selects the RNG streams of this run.
pub fn run_commit(
    params: &ProtocolParams,
    code: &LinearCode,
    seed: u64,
    trial: u64,
    channel_eps: f64,
    hooks: &AdversaryHooks,
) -> Result<(CommitState, Transcript), EbcError> {
    if code.n() != params.n || code.k() != params.k || code.d() != params.d {
        return Err(EbcError::Protocol(format!(
            "code [{},{},{}] does not match params [{},{},{}]",
            code.n(),
            code.k(),
            code.d(),
            params.n,
            params.k,
            params.d
        )));
    }
    let mut alice_rng = trial_rng(seed, trial, streams::ALICE);
    let mut channel_rng = trial_rng(seed, trial, streams::CHANNEL);
    let mut adversary_rng = trial_rng(seed, trial, streams::ADVERSARY);
    let mut transcript = Transcript::default();

    // Step 1-2: sample (x, z, r, theta); c = Ext(x, r); y = Enc(x); u = y + z.
    let x = sample_uniform(params.k, &mut alice_rng);
    let z = sample_uniform(params.n, &mut alice_rng);
    let r = ToeplitzSeed::new(
        sample_uniform(ToeplitzSeed::seed_len(params.k, params.ell), &mut alice_rng),
        params.k,
        params.ell,
    )?;
    let theta = sample_uniform(params.n, &mut alice_rng);
    let c = extract(&x, &r)?;
    let committed_y = match &hooks.commit_y_override {
        Some(y_tilde) => {
            if y_tilde.len() != params.n {
                return Err(EbcError::LengthMismatch {
                    left: y_tilde.len(),
                    right: params.n,
                });
            }
            y_tilde.clone()
        }
        None => code.encode(&x)?,
    };
    let u = committed_y.xor(&z)?;

    // Step 3: (z, r, theta) to Bob; Bob acknowledges through broadcast.
    transcript.record(
        PartyId::Alice,
        Destination::Party(PartyId::Bob),
        MessageKind::ClassicalPrivate,
        "z,r,theta",
        &format!("{z}|{}|{theta}", r.bits()),
    );
    transcript.record(
        PartyId::Bob,
        Destination::Broadcast,
        MessageKind::Broadcast,
        "ack-classical",
        "ack",
    );
    transcript.end_step(PartyId::Bob);

    // Step 4-5: prepare |psi> = H^theta |u> and distribute n/m per node,
    // through the noisy channel.
    let mut register = Bb84Register::prepare(&u, &theta)?;
    register.apply_depolarizing(channel_eps, &mut channel_rng)?;

    let per = params.qubits_per_node();
    let mut node_regs = Vec::with_capacity(params.m);
    let mut node_logs = Vec::with_capacity(params.m);
    let mut remaining = register;
    for node in 0..params.m {
        let slice = remaining.split_range(0..per);
        let declared = if hooks.oversized_payload_to == Some(node) {
            per + 1
        } else {
            per
        };
        transcript.record(
            PartyId::Alice,
            Destination::Party(PartyId::Trusted(node)),
            MessageKind::Qubits,
            "qubit-slice",
            &format!("node {node}: {declared} qubits"),
        );
        // Step 6 check: the node verifies the payload is n/m qubit-shaped.
        if declared != per {
            let note = format!(
                "T{node}: received {declared}-qubit payload, expected {per}; deviation announced"
            );
            transcript.record(
                PartyId::Trusted(node),
                Destination::Broadcast,
                MessageKind::Broadcast,
                "deviation",
                &note,
            );
            transcript.deviations.push(note);
        }
        node_regs.push(slice);
        node_logs.push(NodeLog {
            slice_start: node * per,
            slice_len: per,
            received_step: transcript.step,
            measurements: Vec::new(),
        });
    }
    debug_assert!(remaining.is_empty());

    // Quantum-internal deviation by corrupt nodes: replace the slice.
    if hooks.commit_replace_slices {
        for &node in &hooks.corrupt_nodes {
            let fresh_bits = sample_uniform(per, &mut adversary_rng);
            let fresh_bases = sample_uniform(per, &mut adversary_rng);
            node_regs[node] = Bb84Register::prepare(&fresh_bits, &fresh_bases)?;
            transcript
                .deviations
                .push(format!("adversary: T{node} slice replaced"));
        }
    }

    // Step 6: acknowledgment broadcasts.
    for node in 0..params.m {
        transcript.record(
            PartyId::Trusted(node),
            Destination::Broadcast,
            MessageKind::Broadcast,
            "ack-qubits",
            "ack",
        );
    }
    transcript.end_step(PartyId::Alice);

    // Step 7: Alice outputs c.
    transcript.commitment = Some(c.clone());

    Ok((
        CommitState {
            params: *params,
            code: code.clone(),
            seed,
            trial,
            x,
            z,
            theta,
            r,
            c,
            committed_y,
            node_regs,
            node_logs,
        },
        transcript,
    ))
}

fn apply_measure_resend(
    state: &mut CommitState,
    hooks: &AdversaryHooks,
    rng: &mut crate::rng::Rng,
) {
    let Some(attack) = hooks.node_measure_resend else {
        return;
    };
    let per = state.params.qubits_per_node();
    for node in 0..state.params.m {
        let applies = match attack.nodes {
            NodeSet::All => true,
            NodeSet::Corrupt => hooks.is_corrupt(node),
        };
        if !applies {
            continue;
        }
        for local in 0..per {
            if (rng.gen::<f64>()) < attack.fraction {
                let basis = rng.gen_range(0..=1u8);
                let outcome = state.node_regs[node].measure_single(local, basis, rng);
                state.node_logs[node]
                    .measurements
                    .push((node * per + local, basis, outcome));
            }
        }
    }
}

use rand::Rng as _;

/// Outcome of an open or erase phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    pub c_hat: BitString,
    pub flag_a: Flag,
    pub flag_b: Flag,
    /// Hamming disagreement measured during verification.
    pub disagreement: usize,
}

/// Run the open phase on a completed commit.
pub fn run_open(
    mut state: CommitState,
    hooks: &AdversaryHooks,
    transcript: &mut Transcript,
) -> Result<(PhaseOutcome, CommitState), EbcError> {
    let params = state.params;
    let mut bob_rng = trial_rng(state.seed, state.trial, streams::BOB);
    let mut adversary_rng = trial_rng(state.seed, state.trial, streams::ADVERSARY + 512);

    // Step 1: Alice broadcasts "open" and sends x (possibly substituted).
    transcript.record(
        PartyId::Alice,
        Destination::Broadcast,
        MessageKind::Broadcast,
        "open",
        "open",
    );
    let opened_x = hooks.open_substitute_x.clone().unwrap_or_else(|| state.x.clone());
    if opened_x.len() != params.k {
        return Err(EbcError::LengthMismatch {
            left: opened_x.len(),
            right: params.k,
        });
    }
    transcript.record(
        PartyId::Alice,
        Destination::Party(PartyId::Bob),
        MessageKind::ClassicalPrivate,
        "x",
        &opened_x.to_string(),
    );
    transcript.end_step(PartyId::Alice);

    // Node-side attacks before forwarding.
    apply_measure_resend(&mut state, hooks, &mut adversary_rng);
    if !hooks.open_flip_positions.is_empty() {
        let per = params.qubits_per_node();
        for &pos in &hooks.open_flip_positions {
            let node = pos / per;
            if hooks.is_corrupt(node) {
                state.node_regs[node].corrupt_positions(
                    &[pos % per],
                    CorruptOp::Flip,
                    &mut adversary_rng,
                )?;
            }
        }
    }

    // Step 2: nodes forward slices to Bob; Bob reassembles in index order.
    let mut assembled = Bb84Register::empty();
    for node in 0..params.m {
        let slice = std::mem::replace(&mut state.node_regs[node], Bb84Register::empty());
        transcript.record(
            PartyId::Trusted(node),
            Destination::Party(PartyId::Bob),
            MessageKind::Qubits,
            "qubit-slice",
            &format!("node {node}: {} qubits", slice.len()),
        );
        assembled.append(slice);
    }
    transcript.end_step(PartyId::Bob);

    // Steps 3-6: Bob measures in theta, checks the Hamming disagreement.
    let u_hat = assembled.measure_in_basis(&state.theta, &mut bob_rng)?;
    let y_hat = u_hat.xor(&state.z)?;
    let y_prime = state.code.encode(&opened_x)?;
    let h = hamming_distance(&y_hat, &y_prime)?;
    let threshold = params.accept_threshold();
    let (c_hat, flag) = if h > threshold {
        (BitString::zeros(params.ell), Flag::Failure)
    } else {
        (extract(&opened_x, &state.r)?, Flag::Success)
    };
    transcript.record(
        PartyId::Bob,
        Destination::Broadcast,
        MessageKind::Broadcast,
        "flag",
        &flag.to_string(),
    );
    transcript.end_step(PartyId::Bob);
    transcript.opened = Some(opened_x);
    transcript.flag_a = Some(flag);
    transcript.flag_b = Some(flag);

    Ok((
        PhaseOutcome {
            c_hat,
            flag_a: flag,
            flag_b: flag,
            disagreement: h,
        },
        state,
    ))
}

/// Run the erase phase on a completed commit.
pub fn run_erase(
    mut state: CommitState,
    hooks: &AdversaryHooks,
    transcript: &mut Transcript,
) -> Result<(PhaseOutcome, CommitState), EbcError> {
    let params = state.params;
    let mut alice_rng = trial_rng(state.seed, state.trial, streams::ALICE + 512);
    let mut adversary_rng = trial_rng(state.seed, state.trial, streams::ADVERSARY + 768);

    // Step 1: Alice broadcasts "erase".
    transcript.record(
        PartyId::Alice,
        Destination::Broadcast,
        MessageKind::Broadcast,
        "erase",
        "erase",
    );
    transcript.end_step(PartyId::Alice);

    // Node-side attacks before returning the slices.
    apply_measure_resend(&mut state, hooks, &mut adversary_rng);

    // Step 2: nodes return slices to Alice.
    let mut assembled = Bb84Register::empty();
    for node in 0..params.m {
        let slice = std::mem::replace(&mut state.node_regs[node], Bb84Register::empty());
        transcript.record(
            PartyId::Trusted(node),
            Destination::Party(PartyId::Alice),
            MessageKind::Qubits,
            "qubit-slice",
            &format!("node {node}: {} qubits", slice.len()),
        );
        assembled.append(slice);
    }
    transcript.end_step(PartyId::Alice);

    // Steps 3-5: Alice measures in theta and verifies against her y.
    let u_hat = assembled.measure_in_basis(&state.theta, &mut alice_rng)?;
    let y_hat = u_hat.xor(&state.z)?;
    let h = hamming_distance(&y_hat, &state.committed_y)?;
    let flag = if h > params.accept_threshold() {
        Flag::Failure
    } else {
        Flag::Erase
    };
    // Step 6: Alice broadcasts her flag; Bob mirrors it and outputs 0^ell.
    transcript.record(
        PartyId::Alice,
        Destination::Broadcast,
        MessageKind::Broadcast,
        "flag",
        &flag.to_string(),
    );
    transcript.end_step(PartyId::Alice);
    transcript.flag_a = Some(flag);
    transcript.flag_b = Some(flag);

    Ok((
        PhaseOutcome {
            c_hat: BitString::zeros(params.ell),
            flag_a: flag,
            flag_b: flag,
            disagreement: h,
        },
        state,
    ))
}
