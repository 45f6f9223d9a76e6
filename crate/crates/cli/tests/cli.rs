//! End-to-end checks of the `ebc` binary: exit codes, output files, and
//! replay determinism.

use std::path::Path;
use std::process::{Command, Output};

fn ebc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const HONEST: &str = r#"
seed = 7
trials = 50
phase = "open"

[params]
n = 16
m = 8
t = 1
gamma = 0.0
k = 2
d = 10
ell = 1

[code]
inline = ["1111111111000000", "0000001111111111"]

[checks]
min_success_rate = 1.0

[output]
jsonl = "runs.jsonl"
csv = "runs.csv"
"#;

#[test]
fn honest_run_passes_and_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.toml"), HONEST).unwrap();
    let first = ebc(&["run", "--config", "s.toml"], dir.path());
    assert!(first.status.success(), "{first:?}");
    let jsonl = std::fs::read(dir.path().join("runs.jsonl")).unwrap();
    let csv = std::fs::read(dir.path().join("runs.csv")).unwrap();
    assert!(csv.starts_with(b"aggregate,trial,"));
    assert_eq!(jsonl.iter().filter(|&&b| b == b'\n').count(), 51);

    let second = ebc(&["run", "--config", "s.toml"], dir.path());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(jsonl, std::fs::read(dir.path().join("runs.jsonl")).unwrap());
    assert_eq!(csv, std::fs::read(dir.path().join("runs.csv")).unwrap());
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Substituted opening is rejected, so the success-rate check fails.
    let config = HONEST.replace(
        "[checks]",
        "[adversary]\nstrategy = \"substitute-open\"\nsubstitute_x = \"11\"\n\n[checks]",
    );
    std::fs::write(dir.path().join("s.toml"), config).unwrap();
    let out = ebc(&["run", "--config", "s.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.toml"), "not a scenario").unwrap();
    let out = ebc(&["run", "--config", "s.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn out_of_model_requires_flag() {
    let dir = tempfile::tempdir().unwrap();
    // d = 10 < 4 * threshold + 1 once gamma pushes the threshold to 4.
    let config = HONEST.replace("gamma = 0.0", "gamma = 0.2");
    std::fs::write(dir.path().join("s.toml"), config).unwrap();
    let refused = ebc(&["run", "--config", "s.toml"], dir.path());
    assert_eq!(refused.status.code(), Some(2), "{refused:?}");
    let forced = ebc(&["run", "--config", "s.toml", "--out-of-model"], dir.path());
    assert!(forced.status.success(), "{forced:?}");
}

#[test]
fn binding_expectation_gates_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.toml"), HONEST).unwrap();
    let pass = ebc(
        &["attack", "binding", "--config", "s.toml", "--expect-equivocation", "0"],
        dir.path(),
    );
    assert!(pass.status.success(), "{pass:?}");
    let fail = ebc(
        &["attack", "binding", "--config", "s.toml", "--expect-equivocation", "1"],
        dir.path(),
    );
    assert_eq!(fail.status.code(), Some(1), "{fail:?}");
}

#[test]
fn codes_search_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let search = ebc(
        &["--seed", "3", "codes", "search", "--n", "16", "--k", "2", "--d", "10",
          "--attempts", "50000", "--out", "code.txt"],
        dir.path(),
    );
    assert!(search.status.success(), "{search:?}");
    let verify = ebc(&["codes", "verify", "code.txt"], dir.path());
    assert!(verify.status.success(), "{verify:?}");
    assert!(String::from_utf8_lossy(&verify.stdout).contains("verified [16, 2,"));
}

#[test]
fn full_transcript_goes_to_configured_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = HONEST.replace("[output]", "[output]\ntranscript = \"t.json\"");
    std::fs::write(dir.path().join("s.toml"), config).unwrap();
    let out = ebc(&["run", "--config", "s.toml", "--full-transcript"], dir.path());
    assert!(out.status.success(), "{out:?}");
    let transcript = std::fs::read_to_string(dir.path().join("t.json")).unwrap();
    assert!(transcript.contains("\"messages\""));
}
