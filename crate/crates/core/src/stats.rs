//! Trial aggregation helpers: Wilson confidence intervals, exact binomial
//! tails, and the data-parallel trial mapper.
//!
//! With the `parallel` feature (default) trials fan out across threads via
//! rayon; without it the same API runs sequentially. Each trial draws its
//! own RNG streams, so the aggregate is identical either way.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map trial indices through `f` and collect. Order of the output matches
/// the trial index order regardless of execution order.
pub fn run_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..trials as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials as u64).map(f).collect()
    }
}

/// A binomial proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// z-score for the 99% two-sided Wilson interval.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Wilson score interval at confidence given by `z`.
pub fn wilson(successes: usize, trials: usize, z: f64) -> Proportion {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Proportion {
        successes,
        trials,
        estimate: p,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    }
}

/// Three-sigma sampling slack for a proportion estimated from `trials`
/// Bernoulli draws, at the conservative variance 1/4.
pub fn three_sigma_slack(trials: usize) -> f64 {
    3.0 * (0.25 / trials as f64).sqrt()
}

/// Exact lower binomial tail Pr[Bin(n, p) <= k], summed term by term.
pub fn binomial_cdf(k: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    // Log-space terms to stay stable for large n.
    let mut sum = 0.0f64;
    for i in 0..=k.min(n) {
        let log_term = log_choose(n, i)
            + i as f64 * p.ln()
            + (n - i) as f64 * (1.0 - p).ln();
        sum += log_term.exp();
    }
    sum.min(1.0)
}

fn log_choose(n: usize, k: usize) -> f64 {
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

fn log_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}
