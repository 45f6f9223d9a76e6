//! Closed-form security bounds: binary entropy, the GV regime boundary, the
//! hiding min-entropy chain, correctness epsilon, the expungement
//! smooth-min-entropy bound, and the weak-binding conversion.
//!
//! All entropies are in bits. The smoothing parameters `mu_eps` and
//! `delta_eps` of the sampling-based uncertainty relation are caller-supplied
//! inputs; their exact forms live in the sampling literature and are not
//! reproduced here.

use serde::{Deserialize, Serialize};

use crate::error::EbcError;
use crate::params::ProtocolParams;

/// A named bound evaluation with a per-step formula trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: Vec<(String, f64)>,
    /// Bits or probability depending on the bound.
    pub value: f64,
    pub trace: Vec<String>,
}

impl BoundReport {
    pub fn render(&self) -> String {
        let mut out = format!("{}: {:.9}\n", self.name, self.value);
        for (name, v) in &self.inputs {
            out.push_str(&format!("  in  {name} = {v}\n"));
        }
        for line in &self.trace {
            out.push_str(&format!("  ... {line}\n"));
        }
        out
    }
}

/// H2(p) = -p log2 p - (1-p) log2(1-p), with 0 log 0 = 0.
pub fn binary_entropy(p: f64) -> Result<f64, EbcError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EbcError::ParameterOutOfRange(format!(
            "binary entropy argument {p} outside [0, 1]"
        )));
    }
    let term = |q: f64| if q == 0.0 { 0.0 } else { -q * q.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Root of r = 1 - H2(4r) on (0, 1/4), found by bisection. The boundary of
/// the feasible code regime.
pub fn gv_boundary_root() -> f64 {
    let f = |r: f64| 1.0 - binary_entropy(4.0 * r).unwrap() - r;
    // f is positive again for r > 1/8 (H2(4r) falls off), so bracket the
    // low root only.
    let mut lo = 1e-6;
    let mut hi = 0.125;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Min-entropy of X given the coalition view after commit:
/// k - (t/m + gamma) n.
pub fn hiding_min_entropy_bound(params: &ProtocolParams) -> BoundReport {
    let leak = params.corruption_rate() * params.n as f64;
    let value = params.k as f64 - leak;
    BoundReport {
        name: "hiding_min_entropy".to_string(),
        inputs: vec![
            ("k".to_string(), params.k as f64),
            ("n".to_string(), params.n as f64),
            ("t/m + gamma".to_string(), params.corruption_rate()),
        ],
        value,
        trace: vec![
            format!("leaked positions (t/m + gamma) n = {leak}"),
            format!("k - leak = {value}"),
        ],
    }
}

/// Correctness error: 2^{-delta' n / 2 - 1} + 5 m sqrt(2 delta), where delta
/// is the honest-but-curious slack (0 for perfectly honest nodes).
pub fn correctness_epsilon(delta_prime: f64, n: usize, m: usize, delta_hbc: f64) -> f64 {
    2f64.powf(-delta_prime * n as f64 / 2.0 - 1.0)
        + 5.0 * m as f64 * (2.0 * delta_hbc).sqrt()
}

/// Chain-rule penalty f_eps = log2(1 / (1 - sqrt(1 - eps^2))). Diverges as
/// eps -> 0.
pub fn f_epsilon(eps: f64) -> Result<f64, EbcError> {
    if eps <= 0.0 || eps > 1.0 {
        return Err(EbcError::ParameterOutOfRange(format!(
            "f_epsilon argument {eps} outside (0, 1]"
        )));
    }
    Ok((1.0 / (1.0 - (1.0 - eps * eps).sqrt())).log2())
}

/// Smooth min-entropy retained by X against the node coalition after a
/// successful erase: k - n H2(gamma + mu_eps) - delta_eps - 6 f_eps.
pub fn expungement_bound(
    n: usize,
    k: usize,
    gamma: f64,
    eps: f64,
    mu_eps: f64,
    delta_eps: f64,
) -> Result<BoundReport, EbcError> {
    let p = gamma + mu_eps;
    if !(0.0..=0.5).contains(&p) {
        return Err(EbcError::ParameterOutOfRange(format!(
            "gamma + mu_eps = {p} outside [0, 1/2]"
        )));
    }
    let f = f_epsilon(eps)?;
    let entropy_term = n as f64 * binary_entropy(p)?;
    let chain_term = 6.0 * f;
    let value = k as f64 - entropy_term - delta_eps - chain_term;
    Ok(BoundReport {
        name: "expungement_bound".to_string(),
        inputs: vec![
            ("n".to_string(), n as f64),
            ("k".to_string(), k as f64),
            ("gamma".to_string(), gamma),
            ("eps".to_string(), eps),
            ("mu_eps".to_string(), mu_eps),
            ("delta_eps".to_string(), delta_eps),
        ],
        value,
        trace: vec![
            format!("sampling entropy loss n H2(gamma + mu_eps) = {entropy_term}"),
            format!("uncertainty-relation slack delta_eps = {delta_eps}"),
            format!("chain-rule penalty 6 f_eps = {chain_term} (f_eps = {f}; two single-f and two double-f applications)"),
            format!("k - losses = {value}"),
        ],
    })
}

/// Uncertainty-relation floor on the measured register:
/// n (1 - H2(gamma + mu_eps)) - delta_eps.
pub fn uncertainty_relation_bound(
    n: usize,
    gamma: f64,
    mu_eps: f64,
    delta_eps: f64,
) -> Result<f64, EbcError> {
    let p = gamma + mu_eps;
    if !(0.0..=0.5).contains(&p) {
        return Err(EbcError::ParameterOutOfRange(format!(
            "gamma + mu_eps = {p} outside [0, 1/2]"
        )));
    }
    Ok(n as f64 * (1.0 - binary_entropy(p)?) - delta_eps)
}

/// Weak-binding conversion: a Definition-2-binding protocol with error eps
/// is also Delta-weak-binding with Delta = 2^ell * eps (generic bound,
/// constant factor 1). This protocol's own weak-binding sum is bounded by
/// one, i.e. Delta = 0 on top of the generic term.
pub fn weak_binding_delta(ell: usize, epsilon_bind: f64) -> f64 {
    2f64.powi(ell as i32) * epsilon_bind
}
