//! Symbolic BB84 backend.
//!
//! Every qubit this backend can represent is a BB84 state H^basis |bit>,
//! possibly relabeled by Pauli errors. Pauli phases are unobservable in BB84
//! measurement statistics, so X, Y, and Z reduce to bit flips in the
//! appropriate basis; in particular Y acts as a flip in both bases. This
//! makes the backend exact (no approximation) for all protocol operations
//! and product attacks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::EbcError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Qubit {
    bit: u8,
    basis: u8,
    /// Set when channel noise applied a non-identity Pauli; the fraction of
    /// such qubits is the "corrupted transmissions" statistic.
    noise_corrupted: bool,
}

/// n simulated BB84 qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bb84Register {
    qubits: Vec<Qubit>,
}

/// Adversarial single-position operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorruptOp {
    /// Bit flip in the qubit's own preparation basis.
    Flip,
    /// Pauli X: flips computational-basis preparations, acts as an
    /// unobservable phase on Hadamard-basis ones.
    PauliX,
    /// Discard the qubit and send a fresh BB84 state instead.
    Replace { bit: u8, basis: u8 },
    /// Measure in the given basis (Born rule) and re-prepare the outcome in
    /// that basis.
    MeasureResend { basis: u8 },
}

impl Bb84Register {
    /// |psi> = H^theta |u>, all qubits intact.
    pub fn prepare(u: &BitString, theta: &BitString) -> Result<Self, EbcError> {
        if u.len() != theta.len() {
            return Err(EbcError::LengthMismatch {
                left: u.len(),
                right: theta.len(),
            });
        }
        Ok(Self {
            qubits: u
                .iter()
                .zip(theta.iter())
                .map(|(bit, basis)| Qubit {
                    bit,
                    basis,
                    noise_corrupted: false,
                })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Fraction of qubits hit by a non-identity Pauli during channel noise.
    pub fn noise_corrupted_count(&self) -> usize {
        self.qubits.iter().filter(|q| q.noise_corrupted).count()
    }

    /// Split off the qubits in `range` as an owned register; used to hand a
    /// slice to a trusted node. The source positions are drained, so a qubit
    /// is always held by exactly one register.
    pub fn split_range(&mut self, range: std::ops::Range<usize>) -> Self {
        let tail = self.qubits.split_off(range.end);
        let slice = self.qubits.split_off(range.start);
        self.qubits.extend(tail);
        Self { qubits: slice }
    }

    /// Append another register's qubits (reassembly at open/erase).
    pub fn append(&mut self, other: Bb84Register) {
        self.qubits.extend(other.qubits);
    }

    pub fn empty() -> Self {
        Self { qubits: Vec::new() }
    }

    /// Measure every qubit in the corresponding basis of `theta_meas`,
    /// collapsing the register: after the call each qubit is the BB84 state
    /// of its outcome in the measured basis, so re-measuring in the same
    /// bases is deterministic.
    pub fn measure_in_basis<R: Rng>(
        &mut self,
        theta_meas: &BitString,
        rng: &mut R,
    ) -> Result<BitString, EbcError> {
        if theta_meas.len() != self.len() {
            return Err(EbcError::LengthMismatch {
                left: theta_meas.len(),
                right: self.len(),
            });
        }
        let mut out = BitString::zeros(self.len());
        for (i, q) in self.qubits.iter_mut().enumerate() {
            let basis = theta_meas.bit(i);
            let outcome = if basis == q.basis {
                q.bit
            } else {
                rng.gen_range(0..=1u8)
            };
            q.bit = outcome;
            q.basis = basis;
            out.set_bit(i, outcome);
        }
        Ok(out)
    }

    /// Independent depolarizing noise: with probability `eps` a qubit passes
    /// through I/2, decomposed as a uniformly random Pauli from {I, X, Y, Z}.
    /// Net fraction of corrupted (non-identity Pauli) qubits is 3 eps / 4.
    pub fn apply_depolarizing<R: Rng>(&mut self, eps: f64, rng: &mut R) -> Result<(), EbcError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(EbcError::ParameterOutOfRange(format!(
                "depolarizing eps = {eps} outside [0, 1]"
            )));
        }
        for q in &mut self.qubits {
            if rng.gen::<f64>() < eps {
                match rng.gen_range(0..4u8) {
                    0 => {}
                    // X flips the computational basis, Z the Hadamard basis,
                    // Y both (phases unobservable).
                    1 => {
                        if q.basis == 0 {
                            q.bit ^= 1;
                        }
                        q.noise_corrupted = true;
                    }
                    2 => {
                        q.bit ^= 1;
                        q.noise_corrupted = true;
                    }
                    _ => {
                        if q.basis == 1 {
                            q.bit ^= 1;
                        }
                        q.noise_corrupted = true;
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply an adversarial operation at each listed position.
    pub fn corrupt_positions<R: Rng>(
        &mut self,
        positions: &[usize],
        op: CorruptOp,
        rng: &mut R,
    ) -> Result<(), EbcError> {
        for &i in positions {
            if i >= self.len() {
                return Err(EbcError::PositionOutOfRange {
                    position: i,
                    len: self.len(),
                });
            }
            let q = &mut self.qubits[i];
            match op {
                CorruptOp::Flip => q.bit ^= 1,
                CorruptOp::PauliX => q.bit ^= 1 ^ q.basis,
                CorruptOp::Replace { bit, basis } => {
                    q.bit = bit & 1;
                    q.basis = basis & 1;
                }
                CorruptOp::MeasureResend { basis } => {
                    let outcome = if basis & 1 == q.basis {
                        q.bit
                    } else {
                        rng.gen_range(0..=1u8)
                    };
                    q.bit = outcome;
                    q.basis = basis & 1;
                }
            }
        }
        Ok(())
    }

    /// Measure position `i` in `basis` without re-preparing elsewhere; the
    /// qubit collapses in place. Returns the outcome. Building block for
    /// curious-node attacks that keep measurement records.
    pub fn measure_single<R: Rng>(&mut self, i: usize, basis: u8, rng: &mut R) -> u8 {
        let q = &mut self.qubits[i];
        let outcome = if basis & 1 == q.basis {
            q.bit
        } else {
            rng.gen_range(0..=1u8)
        };
        q.bit = outcome;
        q.basis = basis & 1;
        outcome
    }

    /// The (bit, basis) labels of qubit `i`. Test/diagnostic access; honest
    /// parties never read this.
    pub fn peek(&self, i: usize) -> (u8, u8) {
        (self.qubits[i].bit, self.qubits[i].basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::sample_uniform;
    use crate::rng::master_rng;

    #[test]
    fn prepare_and_same_basis_roundtrip() {
        let mut rng = master_rng(1, 0);
        let u = sample_uniform(32, &mut rng);
        let theta = sample_uniform(32, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let outcome = reg.measure_in_basis(&theta, &mut rng).unwrap();
        assert_eq!(outcome, u);
    }

    #[test]
    fn prepare_length_mismatch() {
        let u = BitString::parse("01").unwrap();
        let theta = BitString::parse("0").unwrap();
        assert!(Bb84Register::prepare(&u, &theta).is_err());
    }

    #[test]
    fn wrong_basis_outcome_is_uniform() {
        let mut rng = master_rng(2, 0);
        let u = BitString::parse("1").unwrap();
        let theta = BitString::parse("0").unwrap();
        let meas = BitString::parse("1").unwrap();
        let mut ones = 0usize;
        let trials = 100_000;
        for _ in 0..trials {
            let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
            ones += reg.measure_in_basis(&meas, &mut rng).unwrap().weight();
        }
        let freq = ones as f64 / trials as f64;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn measurement_is_idempotent() {
        let mut rng = master_rng(3, 0);
        let u = sample_uniform(64, &mut rng);
        let theta = sample_uniform(64, &mut rng);
        let meas = sample_uniform(64, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let first = reg.measure_in_basis(&meas, &mut rng).unwrap();
        let second = reg.measure_in_basis(&meas, &mut rng).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn flips_propagate_to_same_basis_measurement() {
        let mut rng = master_rng(4, 0);
        let u = sample_uniform(16, &mut rng);
        let theta = sample_uniform(16, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        reg.corrupt_positions(&[3, 7], CorruptOp::Flip, &mut rng).unwrap();
        let outcome = reg.measure_in_basis(&theta, &mut rng).unwrap();
        let diff = outcome.xor(&u).unwrap();
        assert_eq!(diff.weight(), 2);
        assert_eq!(diff.bit(3), 1);
        assert_eq!(diff.bit(7), 1);
    }

    #[test]
    fn empty_corruption_is_identity() {
        let mut rng = master_rng(5, 0);
        let u = sample_uniform(8, &mut rng);
        let theta = sample_uniform(8, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let copy = reg.clone();
        reg.corrupt_positions(&[], CorruptOp::Flip, &mut rng).unwrap();
        assert_eq!(reg, copy);
    }

    #[test]
    fn out_of_range_position_rejected() {
        let mut rng = master_rng(5, 1);
        let u = BitString::parse("01").unwrap();
        let mut reg = Bb84Register::prepare(&u, &u).unwrap();
        assert!(reg
            .corrupt_positions(&[2], CorruptOp::Flip, &mut rng)
            .is_err());
    }

    #[test]
    fn same_basis_measure_resend_is_undetectable() {
        let mut rng = master_rng(6, 0);
        let u = sample_uniform(64, &mut rng);
        let theta = sample_uniform(64, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let positions: Vec<usize> = (0..64).collect();
        for &i in &positions {
            let basis = theta.bit(i);
            reg.corrupt_positions(&[i], CorruptOp::MeasureResend { basis }, &mut rng)
                .unwrap();
        }
        let outcome = reg.measure_in_basis(&theta, &mut rng).unwrap();
        assert_eq!(outcome, u);
    }

    #[test]
    fn depolarizing_zero_is_identity() {
        let mut rng = master_rng(7, 0);
        let u = sample_uniform(32, &mut rng);
        let theta = sample_uniform(32, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let copy = reg.clone();
        reg.apply_depolarizing(0.0, &mut rng).unwrap();
        assert_eq!(reg, copy);
    }

    #[test]
    fn full_depolarizing_flips_half() {
        // eps = 1: outcome uniform, so flip frequency 1/2.
        let mut rng = master_rng(8, 0);
        let mut flips = 0usize;
        let trials = 100_000;
        for _ in 0..trials {
            let u = BitString::parse("0").unwrap();
            let theta = BitString::parse("0").unwrap();
            let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
            reg.apply_depolarizing(1.0, &mut rng).unwrap();
            flips += reg.measure_in_basis(&theta, &mut rng).unwrap().weight();
        }
        let freq = flips as f64 / trials as f64;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn depolarizing_corruption_fraction() {
        // Non-identity Pauli fraction concentrates at 3 eps / 4.
        let n = 10_000;
        let eps = 0.1;
        let mut rng = master_rng(9, 0);
        let u = sample_uniform(n, &mut rng);
        let theta = sample_uniform(n, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        reg.apply_depolarizing(eps, &mut rng).unwrap();
        let p = 3.0 * eps / 4.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let got = reg.noise_corrupted_count() as f64;
        assert!((got - n as f64 * p).abs() <= 3.0 * sigma, "{got}");
    }

    #[test]
    fn depolarizing_statistics_independent_of_basis() {
        let n = 20_000;
        let eps = 0.3;
        let mut counts = [0usize; 2];
        for basis in 0..2u8 {
            let mut rng = master_rng(10, basis as u64);
            let u = BitString::zeros(n);
            let theta = BitString::new(vec![basis; n]).unwrap();
            let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
            reg.apply_depolarizing(eps, &mut rng).unwrap();
            counts[basis as usize] =
                reg.measure_in_basis(&theta, &mut rng).unwrap().weight();
        }
        let p = eps / 2.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - n as f64 * p).abs() <= 4.0 * sigma, "{c}");
        }
    }

    #[test]
    fn split_and_append_conserve_qubits() {
        let mut rng = master_rng(11, 0);
        let u = sample_uniform(16, &mut rng);
        let theta = sample_uniform(16, &mut rng);
        let mut reg = Bb84Register::prepare(&u, &theta).unwrap();
        let original = reg.clone();
        let mid = reg.split_range(4..8);
        assert_eq!(mid.len(), 4);
        assert_eq!(reg.len(), 12);
        let mut rebuilt = reg.split_range(0..4);
        rebuilt.append(mid);
        rebuilt.append(reg);
        assert_eq!(rebuilt, original);
    }
}
