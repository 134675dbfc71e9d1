//! End-to-end behavior of the expcli binary: exit codes, determinism,
//! provenance columns, and output routing.

use std::path::Path;
use std::process::{Command, Output};

fn expcli(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_expcli"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawning expcli")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_ANALYTIC_SPEC: &str = r#"
name = "smoke-scaling"
kind = "scaling_tradeoff"
output = "smoke.csv"
engines = ["analytic"]

[sweep]
axis = "a_bar"
min = 0.0
max = 2.0
points = 5

[fixed]
n_t = 2
max_beams = 2
"#;

const SMALL_MC_SPEC: &str = r#"
name = "smoke-power"
kind = "power_vs_h"
output = "smoke_power.csv"
engines = ["montecarlo"]

[sweep]
axis = "h"
min = 0.5
max = 1.5
points = 3

[fixed]
n_t = 2
n_beams = 1
a_bar = 0.5
p_dbm = 30.0
theta_db = -40.0

[mc]
n_channel_draws = 1
n_subblock_draws = 500
base_seed = 3
worker_count = 2
"#;

#[test]
fn list_kinds_names_all_eight() {
    let out = expcli(&["list-kinds"], &[]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for kind in [
        "re_tradeoff",
        "rate_vs_h",
        "power_vs_h",
        "scaling_tradeoff",
        "outage_vs_p",
        "rate_vs_p_matched_power",
        "network_throughput",
        "beam_comparison",
    ] {
        assert!(text.contains(kind), "list-kinds output missing {kind}");
    }
}

#[test]
fn bundled_specs_all_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).expect("experiments dir ships with the crate") {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = expcli(&["validate", path.to_str().unwrap()], &[]);
            assert!(out.status.success(), "{} failed: {}", path.display(), stderr_of(&out));
            seen += 1;
        }
    }
    assert!(seen >= 8, "expected a bundled spec per experiment kind, found {seen}");
}

#[test]
fn missing_required_key_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.toml");
    std::fs::write(
        &spec,
        r#"
name = "bad"
kind = "outage_vs_p"
output = "bad.csv"
engines = ["analytic"]

[sweep]
axis = "p_dbm"
min = 10.0
max = 40.0
points = 4

[fixed]
n_t = 2
n_beams = 1
theta_db = -40.0
a_bar = 0.5
"#,
    )
    .unwrap();
    let out = expcli(&["validate", spec.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("fixed.q_hat_w"), "stderr: {}", stderr_of(&out));
}

#[test]
fn unparseable_toml_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("broken.toml");
    std::fs::write(&spec, "name = [unclosed").unwrap();
    let out = expcli(&["run", spec.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_spec_file_exits_4() {
    let out = expcli(&["run", "/nonexistent/nowhere.toml"], &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn run_is_byte_deterministic_and_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("smoke.toml");
    std::fs::write(&spec, SMALL_ANALYTIC_SPEC).unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = expcli(&["run", spec.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()], &[]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        let text = stdout_of(&out);
        assert!(text.contains("wall time:"), "summary missing wall time: {text}");
        assert!(text.contains("max |analytic - montecarlo| / stderr"), "summary missing deviation: {text}");
    }
    let csv_a = std::fs::read(out_a.join("smoke.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("smoke.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "identical spec must produce identical CSV bytes");

    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("spec_name,engine,seed,spec_sha256_12,"), "header: {header}");
    let first = lines.next().unwrap();
    let cells: Vec<&str> = first.split(',').collect();
    assert_eq!(cells[0], "smoke-scaling");
    assert_eq!(cells[1], "analytic");
    assert_eq!(cells[3].len(), 12, "spec hash must be 12 hex chars");
    assert!(cells[3].chars().all(|c| c.is_ascii_hexdigit()));

    assert!(out_a.join("smoke.gnuplot").exists(), "plot script must sit next to the CSV");
}

#[test]
fn seed_flag_overrides_the_spec_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("mc.toml");
    std::fs::write(&spec, SMALL_MC_SPEC).unwrap();

    let run = |tag: &str, seed: Option<&str>| {
        let out_dir = dir.path().join(tag);
        let out_dir_s = out_dir.to_str().unwrap().to_string();
        let mut args = vec!["run", spec.to_str().unwrap(), "--out-dir", &out_dir_s];
        if let Some(s) = seed {
            args.push("--seed");
            args.push(s);
        }
        let out = expcli(&args, &[]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        std::fs::read_to_string(out_dir.join("smoke_power.csv")).unwrap()
    };

    let base = run("base", None);
    let seeded = run("seeded", Some("99"));
    let seeded_again = run("seeded2", Some("99"));
    assert_eq!(seeded, seeded_again, "same seed must reproduce the same bytes");
    assert_ne!(base, seeded, "a different seed must change the MC draws");
    assert!(seeded.lines().nth(1).unwrap().split(',').nth(2) == Some("99"), "seed column must show the override");
}

#[test]
fn env_var_sets_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("smoke.toml");
    std::fs::write(&spec, SMALL_ANALYTIC_SPEC).unwrap();
    let out_dir = dir.path().join("from_env");
    let out = expcli(
        &["run", spec.to_str().unwrap()],
        &[("EXPCLI_OUT_DIR", out_dir.to_str().unwrap())],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(out_dir.join("smoke.csv").exists());
}
