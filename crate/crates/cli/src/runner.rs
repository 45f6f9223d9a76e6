//! Scenario execution and result emission.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use ebc_core::params::Flag;
use ebc_core::protocol::{run_commit, run_erase, run_open, Transcript};
use ebc_core::stats::run_trials;

use crate::config::{Phase, Scenario};

/// One protocol run. Field order is the emission order.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub trial: u64,
    pub flag_a: Flag,
    pub flag_b: Flag,
    pub disagreement: usize,
    /// Bob's extracted commitment equals Alice's (open phase; vacuously true
    /// on erase, where Bob outputs the zero string by construction).
    pub c_match: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub aggregate: bool,
    pub trials: usize,
    pub success_rate: f64,
    pub erase_rate: f64,
    pub c_match_rate: f64,
    pub seed: u64,
    pub config_digest: String,
}

pub struct ScenarioReport {
    pub records: Vec<RunRecord>,
    pub aggregate: Aggregate,
    /// Transcript of trial 0, kept when requested.
    pub transcript: Option<Transcript>,
}

pub fn run_scenario(scenario: &Scenario, keep_transcript: bool) -> Result<ScenarioReport> {
    let cfg = &scenario.config;
    let results = run_trials(cfg.trials, |trial| {
        let (state, mut transcript) = run_commit(
            &cfg.params,
            &scenario.code,
            cfg.seed,
            trial,
            cfg.channel_eps,
            &scenario.hooks,
        )?;
        let c = state.c.clone();
        let (outcome, _) = match cfg.phase {
            Phase::Open => run_open(state, &scenario.hooks, &mut transcript)?,
            Phase::Erase => run_erase(state, &scenario.hooks, &mut transcript)?,
        };
        Ok::<_, ebc_core::EbcError>((
            RunRecord {
                trial,
                flag_a: outcome.flag_a,
                flag_b: outcome.flag_b,
                disagreement: outcome.disagreement,
                c_match: match cfg.phase {
                    Phase::Open => outcome.c_hat == c,
                    Phase::Erase => true,
                },
            },
            if keep_transcript && trial == 0 {
                Some(transcript)
            } else {
                None
            },
        ))
    });
    let mut records = Vec::with_capacity(cfg.trials);
    let mut transcript = None;
    for r in results {
        let (record, t) = r.context("protocol run failed")?;
        if let Some(t) = t {
            transcript = Some(t);
        }
        records.push(record);
    }
    let count = |f: &dyn Fn(&RunRecord) -> bool| {
        records.iter().filter(|r| f(r)).count() as f64 / cfg.trials.max(1) as f64
    };
    let aggregate = Aggregate {
        aggregate: true,
        trials: cfg.trials,
        success_rate: count(&|r| r.flag_b == Flag::Success && r.c_match),
        erase_rate: count(&|r| r.flag_a == Flag::Erase),
        c_match_rate: count(&|r| r.c_match),
        seed: cfg.seed,
        config_digest: scenario.config_digest.clone(),
    };
    Ok(ScenarioReport {
        records,
        aggregate,
        transcript,
    })
}

/// Configured checks that failed, empty when all pass.
pub fn failed_checks(scenario: &Scenario, report: &ScenarioReport) -> Vec<String> {
    let checks = &scenario.config.checks;
    let mut failures = Vec::new();
    let mut check = |name: &str, min: Option<f64>, got: f64| {
        if let Some(min) = min {
            if got < min {
                failures.push(format!("{name} {got} below required {min}"));
            }
        }
    };
    check(
        "success_rate",
        checks.min_success_rate,
        report.aggregate.success_rate,
    );
    check(
        "erase_rate",
        checks.min_erase_rate,
        report.aggregate.erase_rate,
    );
    check(
        "c_match_rate",
        checks.min_c_match_rate,
        report.aggregate.c_match_rate,
    );
    failures
}

/// One JSON object per run, aggregate object last.
pub fn emit_jsonl(report: &ScenarioReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    for record in &report.records {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(&report.aggregate)?);
    out.push('\n');
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

const CSV_HEADER: &str = "aggregate,trial,flag_a,flag_b,disagreement,c_match,success_rate,erase_rate,c_match_rate";

/// Per-run rows leave the rate columns empty; the aggregate row leaves the
/// per-run columns empty.
pub fn emit_csv(report: &ScenarioReport, path: &Path) -> Result<()> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        writeln!(
            out,
            "false,{},{},{},{},{},,,",
            r.trial, r.flag_a, r.flag_b, r.disagreement, r.c_match
        )?;
    }
    let a = &report.aggregate;
    writeln!(
        out,
        "true,,,,,,{},{},{}",
        a.success_rate, a.erase_rate, a.c_match_rate
    )?;
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}
