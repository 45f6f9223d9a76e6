//! Protocol parameters, derived thresholds, and validation.

use serde::{Deserialize, Serialize};

/// Outcome flag shared by Alice and Bob at the end of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flag {
    Success,
    Failure,
    Erase,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flag::Success => write!(f, "success"),
            Flag::Failure => write!(f, "failure"),
            Flag::Erase => write!(f, "erase"),
        }
    }
}

/// Parameters of one protocol instance.
///
/// The code is supplied explicitly as a verified `[n, k, d]` triple; the
/// extractor rates `delta_c` and `delta_prime` are derived from `(k, ell,
/// accept_threshold)` rather than imposed. At desk scale the asymptotic rate
/// relation rarely holds exactly; `validate` flags that case without
/// rejecting it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Codeword length; number of qubits.
    pub n: usize,
    /// Trusted node count.
    pub m: usize,
    /// Maximum number of dishonest nodes.
    pub t: usize,
    /// Tolerable corruption fraction of the quantum channels.
    pub gamma: f64,
    /// Code dimension.
    pub k: usize,
    /// Verified minimum distance of the code.
    pub d: usize,
    /// Commitment length.
    pub ell: usize,
}

impl ProtocolParams {
    /// floor((t/m + gamma) * n): the maximum Hamming disagreement tolerated
    /// at open and erase verification. Floor is the conservative choice for
    /// Bob's acceptance test.
    pub fn accept_threshold(&self) -> usize {
        ((self.t as f64 / self.m as f64 + self.gamma) * self.n as f64).floor() as usize
    }

    /// t/m + gamma, the combined corruption rate.
    pub fn corruption_rate(&self) -> f64 {
        self.t as f64 / self.m as f64 + self.gamma
    }

    pub fn qubits_per_node(&self) -> usize {
        self.n / self.m
    }

    /// Positions held by trusted node `index` (0-based): a contiguous slice.
    pub fn node_slice(&self, index: usize) -> std::ops::Range<usize> {
        let per = self.qubits_per_node();
        index * per..(index + 1) * per
    }

    /// Extractor output rate ell / n.
    pub fn delta_c(&self) -> f64 {
        self.ell as f64 / self.n as f64
    }

    /// Security-gap rate: (k - accept_threshold - ell) / n, the per-qubit
    /// min-entropy margin left after leakage and extraction.
    pub fn delta_prime(&self) -> f64 {
        (self.k as f64 - self.accept_threshold() as f64 - self.ell as f64) / self.n as f64
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.m == 0 {
            violations.push("m must be positive".to_string());
        } else if self.n % self.m != 0 {
            violations.push(format!(
                "n = {} not divisible by m = {}; pad n upward",
                self.n, self.m
            ));
        }
        if self.t > self.m {
            violations.push(format!("t = {} exceeds m = {}", self.t, self.m));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            violations.push(format!("gamma = {} outside [0, 1)", self.gamma));
        }
        let required_d = 4.0 * self.corruption_rate() * self.n as f64 + 1.0;
        if (self.d as f64) < required_d {
            violations.push(format!(
                "d = {} below 4(t/m + gamma)n + 1 = {required_d}",
                self.d
            ));
        }
        if self.ell > self.k {
            violations.push(format!("ell = {} exceeds k = {}", self.ell, self.k));
        }
        ValidationReport {
            violations,
            gv_regime: self.corruption_rate() <= 0.083,
        }
    }
}

/// Result of parameter validation. Violations are reported, not thrown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Whether t/m + gamma <= 0.083, the asymptotic regime where random
    /// codes of the required distance exist. Tiny-n concrete codes may still
    /// be valid outside it.
    pub gv_regime: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
