//! `ebc`: run the erasable-bit-commitment simulator, mount attacks, evaluate
//! security bounds, and search for codes.
//!
//! Exit codes: 0 all checks pass, 1 a configured check failed, 2 usage or
//! config error, 3 internal error.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ebc_core::adversary::{
    binding_attack_exhaustive, erase_hiding_advantage, expungement_attack_run, hiding_advantage,
    open_hiding_advantage, CoalitionSpec,
};
use ebc_core::analysis::{
    correctness_epsilon, expungement_bound, gv_boundary_root, hiding_min_entropy_bound,
    uncertainty_relation_bound,
};
use ebc_core::baselines::{
    classical_equivocation_attack, quantum_equivocation_attack, simple_protocol_run, SimpleAction,
};
use ebc_core::code::{format_code, parse_code, search_random_code};
use ebc_core::rng::master_rng;

use config::{load_scenario, Scenario};

#[derive(Parser)]
#[command(name = "ebc", version, about)]
struct Cli {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the scenario trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Accept parameters that fail validation.
    #[arg(long, global = true)]
    out_of_model: bool,
    /// Emit the full transcript of trial 0.
    #[arg(long, global = true)]
    full_transcript: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config: commit, then open or erase, over many trials.
    Run(ConfigArg),
    /// Mount an attack described by a scenario config.
    Attack {
        #[command(subcommand)]
        mode: AttackMode,
    },
    /// Evaluate closed-form security bounds for a scenario's parameters.
    Bounds {
        #[command(flatten)]
        config: ConfigArg,
        /// Smoothing parameter for the expungement bound.
        #[arg(long)]
        eps: Option<f64>,
        /// Sampling slack mu_eps.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Uncertainty-relation slack delta_eps.
        #[arg(long, default_value_t = 0.0)]
        delta_eps: f64,
        /// Honest-but-curious slack delta for correctness.
        #[arg(long, default_value_t = 0.0)]
        delta_hbc: f64,
    },
    /// Single-node pedagogical protocol and the classical no-go attack.
    Baseline {
        #[command(subcommand)]
        mode: BaselineMode,
    },
    /// Linear-code utilities.
    Codes {
        #[command(subcommand)]
        mode: CodesMode,
    },
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario config (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum AttackMode {
    /// Exhaustive equivocation search over all commit strings.
    Binding {
        #[command(flatten)]
        config: ConfigArg,
        /// Open-time flip budget; defaults to the acceptance threshold.
        #[arg(long)]
        budget: Option<usize>,
        /// Replace the acceptance threshold (counter-experiments).
        #[arg(long)]
        threshold_override: Option<usize>,
        /// Fail (exit 1) unless max equivocation equals this value.
        #[arg(long)]
        expect_equivocation: Option<f64>,
    },
    /// Coalition distinguishing advantage after the given phase.
    Hiding {
        #[command(flatten)]
        config: ConfigArg,
        /// commit | erase | open
        #[arg(long, default_value = "commit")]
        phase: String,
    },
    /// All-nodes measure-and-resend before an erase.
    Expunge {
        #[command(flatten)]
        config: ConfigArg,
        /// Fraction of each slice measured.
        #[arg(long, default_value_t = 1.0)]
        fraction: f64,
    },
}

#[derive(Subcommand)]
enum BaselineMode {
    /// Honest single-qubit commit and open.
    SimpleOpen {
        #[arg(long, default_value_t = 0)]
        bit: u8,
    },
    /// Single-qubit erase followed by a Bob-and-node coalition guess.
    SimpleErase {
        #[arg(long, default_value_t = 0)]
        bit: u8,
    },
    /// Key-relabeling equivocation, classically and against the quantum
    /// variant.
    ClassicalAttack,
}

#[derive(Subcommand)]
enum CodesMode {
    /// Random search for an [n, k, d] generator.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        attempts: usize,
        /// Write the code file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a code file's claimed [n, k, d].
    Verify { path: PathBuf },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            // Errors surfaced before any experiment ran are usage errors.
            ExitCode::from(if err.is::<UsageError>() {
                EXIT_USAGE
            } else {
                EXIT_INTERNAL
            })
        }
    }
}

/// Marker for config and argument problems (exit 2, not 3).
#[derive(Debug)]
struct UsageError;

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid usage")
    }
}

impl std::error::Error for UsageError {}

fn load(cli: &Cli, arg: &ConfigArg) -> Result<Scenario> {
    let mut scenario = load_scenario(&arg.config, cli.out_of_model)
        .context(UsageError)?;
    if let Some(seed) = cli.seed {
        scenario.config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        scenario.config.trials = trials;
    }
    Ok(scenario)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Run(arg) => {
            let scenario = load(&cli, arg)?;
            let report = runner::run_scenario(&scenario, cli.full_transcript)?;
            if let Some(path) = &scenario.config.output.jsonl {
                runner::emit_jsonl(&report, &scenario.config_dir.join(path))?;
            }
            if let Some(path) = &scenario.config.output.csv {
                runner::emit_csv(&report, &scenario.config_dir.join(path))?;
            }
            if let Some(t) = &report.transcript {
                match &scenario.config.output.transcript {
                    Some(path) => std::fs::write(scenario.config_dir.join(path), t.to_json())?,
                    None => println!("{}", t.to_json()),
                }
            }
            println!("{}", serde_json::to_string_pretty(&report.aggregate)?);
            let failures = runner::failed_checks(&scenario, &report);
            for f in &failures {
                eprintln!("check failed: {f}");
            }
            Ok(exit_if(failures.is_empty()))
        }
        Command::Attack { mode } => attack(&cli, mode),
        Command::Bounds {
            config,
            eps,
            mu,
            delta_eps,
            delta_hbc,
        } => {
            let scenario = load(&cli, config)?;
            let p = &scenario.config.params;
            let report = p.validate();
            println!("gv_boundary_root: {:.9}", gv_boundary_root());
            println!(
                "gv_regime: {} (t/m + gamma = {})",
                report.gv_regime,
                p.corruption_rate()
            );
            for v in &report.violations {
                println!("violation: {v}");
            }
            print!("{}", hiding_min_entropy_bound(p).render());
            println!(
                "correctness_epsilon: {:.9e}",
                correctness_epsilon(p.delta_prime(), p.n, p.m, *delta_hbc)
            );
            if let Some(eps) = eps {
                print!(
                    "{}",
                    expungement_bound(p.n, p.k, p.gamma, *eps, *mu, *delta_eps)?.render()
                );
                println!(
                    "uncertainty_relation: {:.9}",
                    uncertainty_relation_bound(p.n, p.gamma, *mu, *delta_eps)?
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Baseline { mode } => baseline(&cli, mode),
        Command::Codes { mode } => codes(&cli, mode),
    }
}

fn attack(cli: &Cli, mode: &AttackMode) -> Result<ExitCode> {
    match mode {
        AttackMode::Binding {
            config,
            budget,
            threshold_override,
            expect_equivocation,
        } => {
            let scenario = load(cli, config)?;
            let p = &scenario.config.params;
            let budget = budget.unwrap_or_else(|| p.accept_threshold());
            let report =
                binding_attack_exhaustive(p, &scenario.code, budget, *threshold_override)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(exit_if(
                expect_equivocation.map_or(true, |e| report.max_equivocation == e),
            ))
        }
        AttackMode::Hiding { config, phase } => {
            let scenario = load(cli, config)?;
            let cfg = &scenario.config;
            let corrupt = &cfg.adversary.corrupt_nodes;
            let est = match phase.as_str() {
                "commit" => hiding_advantage(
                    &cfg.params,
                    &scenario.code,
                    &CoalitionSpec::bob_with_nodes(&cfg.params, corrupt),
                    cfg.trials,
                    cfg.seed,
                )?,
                "erase" => erase_hiding_advantage(
                    &cfg.params,
                    &scenario.code,
                    corrupt,
                    cfg.trials,
                    cfg.seed,
                )?,
                "open" => open_hiding_advantage(
                    &cfg.params,
                    &scenario.code,
                    corrupt,
                    cfg.trials,
                    cfg.seed,
                )?,
                other => {
                    return Err(anyhow::Error::new(UsageError)
                        .context(format!("unknown phase '{other}'")))
                }
            };
            println!("{}", serde_json::to_string_pretty(&est)?);
            Ok(ExitCode::SUCCESS)
        }
        AttackMode::Expunge { config, fraction } => {
            let scenario = load(cli, config)?;
            let cfg = &scenario.config;
            let report = expungement_attack_run(
                &cfg.params,
                &scenario.code,
                *fraction,
                cfg.trials,
                cfg.seed,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn baseline(cli: &Cli, mode: &BaselineMode) -> Result<ExitCode> {
    let trials = cli.trials.unwrap_or(10_000);
    let seed = cli.seed.unwrap_or(0);
    match mode {
        BaselineMode::SimpleOpen { bit } => {
            let report = simple_protocol_run(*bit, SimpleAction::Open, false, trials, seed);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        BaselineMode::SimpleErase { bit } => {
            let report = simple_protocol_run(*bit, SimpleAction::Erase, true, trials, seed);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        BaselineMode::ClassicalAttack => {
            let classical = classical_equivocation_attack(trials, seed);
            let quantum = quantum_equivocation_attack(trials, seed);
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "classical": classical,
                    "quantum_variant": quantum,
                }))?
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn codes(cli: &Cli, mode: &CodesMode) -> Result<ExitCode> {
    match mode {
        CodesMode::Search {
            n,
            k,
            d,
            attempts,
            out,
        } => {
            let mut rng = master_rng(cli.seed.unwrap_or(0), 0);
            match search_random_code(*n, *k, *d, &mut rng, *attempts)? {
                Some(code) => {
                    let text = format_code(&code);
                    match out {
                        Some(path) => std::fs::write(path, text)?,
                        None => print!("{text}"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no [{n}, {k}, {d}] code found in {attempts} attempts");
                    Ok(ExitCode::from(EXIT_CHECK_FAILED))
                }
            }
        }
        CodesMode::Verify { path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            match parse_code(&text) {
                Ok(code) => {
                    println!("verified [{}, {}, {}]", code.n(), code.k(), code.d());
                    Ok(ExitCode::SUCCESS)
                }
                Err(err) => {
                    eprintln!("verification failed: {err}");
                    Ok(ExitCode::from(EXIT_CHECK_FAILED))
                }
            }
        }
    }
}

fn exit_if(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
