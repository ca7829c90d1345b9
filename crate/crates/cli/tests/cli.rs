//! Command-line behavior: exit codes, seed precedence, the selection guard,
//! and input-file immutability.

use std::path::Path;
use std::process::Command;

use bvm_core::report::RunManifest;
use bvm_core::scenarios::scenario_monod;

fn bvm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvm"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn calibrate_succeeds_and_never_mutates_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    let mut config = scenario_monod().config;
    config.mcmc.iterations = 1500;
    write(&config_path, &config.to_json());
    let before = std::fs::read(&config_path).unwrap();

    let out = dir.path().join("artifacts");
    let status = bvm()
        .args(["calibrate", "--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("chain.csv").exists());
    assert!(out.join("manifest.json").exists());
    assert_eq!(before, std::fs::read(&config_path).unwrap());
}

#[test]
fn missing_dataset_path_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    let mut config = scenario_monod().config;
    config.dataset.inline = None;
    config.dataset.path = Some(dir.path().join("nope.csv").display().to_string());
    write(&config_path, &config.to_json());
    let output = bvm()
        .args(["calibrate", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("dataset") || stderr.contains("config"),
        "{stderr}"
    );
}

#[test]
fn malformed_config_field_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    let text = scenario_monod()
        .config
        .to_json()
        .replace("\"model\"", "\"surprise_field\": 1, \"model\"");
    write(&config_path, &text);
    let output = bvm()
        .args(["calibrate", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn infeasible_tolerance_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = bvm()
        .args([
            "calibrate",
            "--scenario",
            "monod",
            "--epsilon",
            "0.01",
            "--out",
        ])
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no feasible starting state"), "{stderr}");
}

#[test]
fn seed_precedence_cli_over_env_over_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let status = bvm()
        .args([
            "calibrate",
            "--scenario",
            "monod",
            "--iterations",
            "500",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&out)
        .env("BVM_SEED", "99")
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = RunManifest::load(out.join("manifest.json")).unwrap();
    assert_eq!(manifest.seed, 7);

    let out = dir.path().join("b");
    let status = bvm()
        .args([
            "calibrate",
            "--scenario",
            "monod",
            "--iterations",
            "500",
            "--out",
        ])
        .arg(&out)
        .env("BVM_SEED", "99")
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = RunManifest::load(out.join("manifest.json")).unwrap();
    assert_eq!(manifest.seed, 99);
}

#[test]
fn select_requires_matching_agreement_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let mut config_a = scenario_monod().config;
    config_a.label = Some("monod-a".into());
    config_a.evidence_draws = Some(20_000);
    let path_a = dir.path().join("a.json");
    write(&path_a, &config_a.to_json());

    // same data and agreement, different (simpler) model
    let mut config_b = config_a.clone();
    config_b.label = Some("constant-b".into());
    config_b.model = "constant1".into();
    config_b.prior = vec![bvm_core::config::PriorComponentConfig::gaussian(0.1, 0.05)];
    let path_b = dir.path().join("b.json");
    write(&path_b, &config_b.to_json());

    let output = bvm()
        .args(["select", "--config-a"])
        .arg(&path_a)
        .args(["--config-b"])
        .arg(&path_b)
        .args(["--evidence-draws", "50000"])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("favored: monod-a"), "{stdout}");

    // identical configs tie exactly (same seed, same draws)
    let output = bvm()
        .args(["select", "--config-a"])
        .arg(&path_a)
        .args(["--config-b"])
        .arg(&path_a)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("factor = 1.000000"), "{stdout}");

    // different agreement definitions are refused
    let mut config_c = config_a.clone();
    config_c.kernel.override_epsilon(0.05).unwrap();
    let path_c = dir.path().join("c.json");
    write(&path_c, &config_c.to_json());
    let output = bvm()
        .args(["select", "--config-a"])
        .arg(&path_a)
        .args(["--config-b"])
        .arg(&path_c)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("refusing comparison"));
}

#[test]
fn evidence_command_reports_flat_kernel_as_unity() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = scenario_monod().config;
    config.kernel = bvm_core::config::KernelConfig::plain("flat");
    let path = dir.path().join("flat.json");
    write(&path, &config.to_json());
    let output = bvm()
        .args(["evidence", "--config"])
        .arg(&path)
        .args(["--evidence-draws", "2000"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("evidence 1.000000e0 +/- 0.00e0"),
        "{stdout}"
    );
}

#[test]
fn reproduce_rejects_unknown_names() {
    let output = bvm().args(["reproduce", "nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn reproduce_matrix_prints_the_full_verdict_table() {
    let output = bvm().args(["reproduce", "matrix"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for kind in ["gaussian", "uniform", "certain"] {
        for method in ["bvm", "classic", "least_squares"] {
            assert!(
                stdout.contains(&format!("matrix_{kind}_{method}/")),
                "missing verdict row for {kind}/{method}:\n{stdout}"
            );
        }
    }
    assert!(!stdout.contains("[FAIL]"), "{stdout}");
}

#[test]
fn reproduce_toy_passes_on_the_default_seed() {
    let output = bvm().args(["reproduce", "toy"]).output().unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stdout)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("compound_boolean_on_means"), "{stdout}");
}

#[test]
fn evidence_refuses_multi_run_scenarios() {
    let output = bvm()
        .args(["evidence", "--scenario", "matrix"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("expands to 9 runs"));
}

#[test]
fn evidence_on_the_truncated_classical_cell_is_zero() {
    let output = bvm()
        .args([
            "evidence",
            "--scenario",
            "matrix_uniform_classic",
            "--evidence-draws",
            "20000",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("evidence 0.000000e0"), "{stdout}");
}

#[test]
fn reproduce_smallwood_prints_reliability_row() {
    let output = bvm().args(["reproduce", "smallwood"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("reliability_in_window"), "{stdout}");
    assert!(stdout.contains("[0.86, 1]"), "{stdout}");
}
