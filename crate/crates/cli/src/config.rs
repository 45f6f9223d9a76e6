//! Scenario configuration: a flat TOML file resolved into protocol
//! parameters, a verified code, and an adversary description.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use ebc_core::code::{parse_code, LinearCode};
use ebc_core::params::ProtocolParams;
use ebc_core::protocol::{AdversaryHooks, MeasureResendAttack, NodeSet};
use ebc_core::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Open,
    Erase,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub trials: usize,
    pub phase: Phase,
    #[serde(default)]
    pub channel_eps: f64,
    pub params: ProtocolParams,
    pub code: CodeSpec,
    #[serde(default)]
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    /// Generator rows as ASCII bit strings.
    pub inline: Option<Vec<String>>,
    /// Path to an "n k d" code file, relative to the config file.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    #[serde(default)]
    pub corrupt_nodes: Vec<usize>,
    /// honest | flip-open | measure-resend | substitute-open
    #[serde(default)]
    pub strategy: Option<String>,
    #[serde(default)]
    pub flip_positions: Vec<usize>,
    #[serde(default)]
    pub fraction: Option<f64>,
    #[serde(default)]
    pub substitute_x: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    pub min_success_rate: Option<f64>,
    pub min_erase_rate: Option<f64>,
    pub min_c_match_rate: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub jsonl: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
}

/// A loaded scenario with everything resolved and verified.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub code: LinearCode,
    pub hooks: AdversaryHooks,
    /// SHA-256 of the raw config bytes, for the round-trip contract.
    pub config_digest: String,
    pub config_dir: PathBuf,
}

pub fn load_scenario(path: &Path, out_of_model: bool) -> Result<Scenario> {
    let raw = std::fs::read(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let config: ScenarioConfig =
        toml::from_str(std::str::from_utf8(&raw).context("config is not UTF-8")?)
            .context("parsing config")?;
    let config_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let code = resolve_code(&config.code, &config_dir)?;
    if code.n() != config.params.n || code.k() != config.params.k || code.d() != config.params.d {
        bail!(
            "code is [{}, {}, {}] but params declare [{}, {}, {}]",
            code.n(),
            code.k(),
            code.d(),
            config.params.n,
            config.params.k,
            config.params.d
        );
    }
    let report = config.params.validate();
    if !report.is_ok() && !out_of_model {
        bail!(
            "parameters out of model (pass --out-of-model to force): {}",
            report.violations.join("; ")
        );
    }
    let hooks = resolve_hooks(&config.adversary, &config.params)?;
    Ok(Scenario {
        hooks,
        code,
        config_digest: hex_digest(&raw),
        config_dir,
        config,
    })
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn resolve_code(spec: &CodeSpec, base: &Path) -> Result<LinearCode> {
    match (&spec.inline, &spec.path) {
        (Some(rows), None) => {
            let rows: Vec<BitString> = rows
                .iter()
                .map(|r| BitString::parse(r))
                .collect::<Result<_, _>>()
                .context("parsing inline generator rows")?;
            LinearCode::new(rows).context("verifying inline code")
        }
        (None, Some(p)) => {
            let full = if p.is_absolute() { p.clone() } else { base.join(p) };
            let text = std::fs::read_to_string(&full)
                .with_context(|| format!("reading code file {}", full.display()))?;
            parse_code(&text).context("parsing code file")
        }
        _ => bail!("[code] needs exactly one of `inline` or `path`"),
    }
}

fn resolve_hooks(spec: &AdversarySpec, params: &ProtocolParams) -> Result<AdversaryHooks> {
    if let Some(&node) = spec.corrupt_nodes.iter().find(|&&n| n >= params.m) {
        bail!("corrupt node {node} out of range (m = {})", params.m);
    }
    if spec.corrupt_nodes.len() > params.t {
        bail!(
            "{} corrupt nodes exceeds t = {}",
            spec.corrupt_nodes.len(),
            params.t
        );
    }
    let mut hooks = AdversaryHooks {
        corrupt_nodes: spec.corrupt_nodes.clone(),
        ..AdversaryHooks::honest()
    };
    match spec.strategy.as_deref().unwrap_or("honest") {
        "honest" => {}
        "flip-open" => {
            hooks.open_flip_positions = spec.flip_positions.clone();
        }
        "measure-resend" => {
            hooks.node_measure_resend = Some(MeasureResendAttack {
                nodes: NodeSet::Corrupt,
                fraction: spec.fraction.unwrap_or(1.0),
            });
        }
        "substitute-open" => {
            let x = spec
                .substitute_x
                .as_deref()
                .context("substitute-open needs `substitute_x`")?;
            hooks.open_substitute_x = Some(BitString::parse(x)?);
        }
        other => bail!("unknown adversary strategy '{other}'"),
    }
    Ok(hooks)
}
