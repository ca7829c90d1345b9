//! Command-line front end: run calibrations from config files, estimate
//! agreement evidence, compare models, and reproduce the canned studies.
//!
//! Exit codes: 0 success, 1 config or comparison error (and failed
//! reproductions), 2 infeasible start (the regression admits no solution at
//! the configured agreement definition).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bvm_core::analysis::{bvm_factor, BvmFactor};
use bvm_core::config::RunConfig;
use bvm_core::report::{EvidenceReport, RunManifest, SelectionReport};
use bvm_core::runner::{
    prepare_run, run_calibration, run_evidence, write_calibration_artifacts, PreparedRun, RunError,
    DEFAULT_EVIDENCE_DRAWS,
};
use bvm_core::scenarios::{run_scenario, scenarios_by_name, Scenario};

#[derive(Parser)]
#[command(
    name = "bvm",
    version,
    about = "Calibrate and validate parametric models through user-defined model-data agreement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full calibration: chain, posterior summary, envelope, manifest.
    Calibrate(CalibrateArgs),
    /// Estimate the agreement evidence by prior Monte Carlo.
    Evidence(EvidenceArgs),
    /// Compare two models by their evidence ratio (same data, same agreement).
    Select(SelectArgs),
    /// Rerun a canned study (monod | toy | smallwood | matrix) and print its
    /// verdict table.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Run config JSON file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["scenario", "manifest"])]
    config: Option<PathBuf>,
    /// Canned scenario name (monod | toy | smallwood).
    #[arg(long, value_name = "NAME", conflicts_with = "manifest")]
    scenario: Option<String>,
    /// Rerun the exact configuration recorded in a manifest.
    #[arg(long, value_name = "PATH")]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct OverrideArgs {
    /// Chain seed; overrides BVM_SEED and the config value.
    #[arg(long)]
    seed: Option<u64>,
    /// Chain iterations override.
    #[arg(long)]
    iterations: Option<usize>,
    /// Agreement tolerance override.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    overrides: OverrideArgs,
    /// Output directory (default: config output_dir, then bvm-runs/LABEL-seedN).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Prior draws for the manifest's evidence estimate.
    #[arg(long, value_name = "N")]
    evidence_draws: Option<usize>,
}

#[derive(Args)]
struct EvidenceArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    overrides: OverrideArgs,
    /// Prior draws for the estimate.
    #[arg(long, value_name = "N")]
    evidence_draws: Option<usize>,
    /// Directory for the JSON report (printed to stdout regardless).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    /// First model's run config.
    #[arg(long, value_name = "PATH")]
    config_a: PathBuf,
    /// Second model's run config.
    #[arg(long, value_name = "PATH")]
    config_b: PathBuf,
    /// Prior draws per evidence estimate.
    #[arg(long, value_name = "N")]
    evidence_draws: Option<usize>,
    /// Directory for the JSON report.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed override applied to both configs.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Study name: monod | toy | smallwood | matrix.
    name: String,
    /// Seed override (matrix cells get seed, seed+1, ...).
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for scenario configs and verdict JSON.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Infeasible(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Runtime(_) => ExitCode::from(1),
            CliError::Infeasible(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Infeasible(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<RunError> for CliError {
    fn from(err: RunError) -> Self {
        match err {
            RunError::Infeasible(e) => CliError::Infeasible(format!("sampling: {e}")),
            RunError::Config(e) => CliError::Config(format!("config: {e}")),
            RunError::Data(e) => CliError::Config(format!("dataset: {e}")),
            RunError::Sampler(e) => CliError::Runtime(format!("sampling: {e}")),
            RunError::Analysis(e) => CliError::Runtime(format!("analysis: {e}")),
            RunError::Io(e) => CliError::Runtime(format!("io: {e}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Evidence(args) => cmd_evidence(args),
        Command::Select(args) => cmd_select(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

/// Seed precedence: --seed, then BVM_SEED, then the config value.
fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("BVM_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("BVM_SEED must be a u64, got {text:?}"))),
        Err(_) => Ok(None),
    }
}

fn load_config(source: &SourceArgs, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let explicit = [
        source.config.is_some(),
        source.scenario.is_some(),
        source.manifest.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if explicit != 1 {
        return Err(CliError::Config(
            "supply exactly one of --config, --scenario, or --manifest".into(),
        ));
    }
    if let Some(path) = &source.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        return RunConfig::from_json(&text).map_err(|e| CliError::Config(e.to_string()));
    }
    if let Some(name) = &source.scenario {
        let mut scenarios = scenarios_by_name(name, seed)
            .ok_or_else(|| CliError::Config(format!("unknown scenario {name:?}")))?;
        if scenarios.len() != 1 {
            return Err(CliError::Config(format!(
                "scenario {name:?} expands to {} runs; use `bvm reproduce {name}`",
                scenarios.len()
            )));
        }
        return Ok(scenarios.remove(0).config);
    }
    let path = source.manifest.as_ref().expect("one source set");
    let manifest = RunManifest::load(path)
        .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
    Ok(manifest.config)
}

fn apply_overrides(
    config: &mut RunConfig,
    overrides: &OverrideArgs,
    env_seed: Option<u64>,
) -> Result<(), CliError> {
    if let Some(seed) = overrides.seed.or(env_seed) {
        config.mcmc.seed = seed;
    }
    if let Some(iterations) = overrides.iterations {
        config.mcmc.iterations = iterations;
    }
    if let Some(eps) = overrides.epsilon {
        config
            .kernel
            .override_epsilon(eps)
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn prepare(config: &RunConfig) -> Result<PreparedRun, CliError> {
    Ok(prepare_run(config)?)
}

fn output_dir(cli_out: &Option<PathBuf>, run: &PreparedRun) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| run.config.output_dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| {
            PathBuf::from("bvm-runs").join(format!("{}-seed{}", run.label, run.mcmc.seed))
        })
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<ExitCode, CliError> {
    let env = env_seed()?;
    let mut config = load_config(&args.source, args.overrides.seed.or(env))?;
    apply_overrides(&mut config, &args.overrides, env)?;
    if let Some(draws) = args.evidence_draws {
        config.evidence_draws = Some(draws);
    }
    let run = prepare(&config)?;
    let outcome = run_calibration(&run)?;
    let dir = output_dir(&args.out, &run);
    let manifest = write_calibration_artifacts(&run, &outcome, &dir)?;
    println!(
        "calibrated {} ({} iterations, acceptance rate {:.3})",
        run.label,
        run.mcmc.iterations,
        outcome.chain.acceptance_rate()
    );
    println!(
        "evidence {:.6e} +/- {:.2e} ({} prior draws)",
        manifest.evidence_estimate, manifest.evidence_std_error, manifest.evidence_draws
    );
    println!("artifacts in {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_evidence(args: EvidenceArgs) -> Result<ExitCode, CliError> {
    let env = env_seed()?;
    let mut config = load_config(&args.source, args.overrides.seed.or(env))?;
    apply_overrides(&mut config, &args.overrides, env)?;
    let run = prepare(&config)?;
    let draws = args
        .evidence_draws
        .or(config.evidence_draws)
        .unwrap_or(DEFAULT_EVIDENCE_DRAWS);
    let estimate = run_evidence(&run, draws)?;
    let report = EvidenceReport {
        label: run.label.clone(),
        kernel: run.kernel.kind_name().into(),
        dataset_hash: run.data.content_hash(),
        draws,
        estimate: estimate.estimate,
        std_error: estimate.std_error,
        seed: run.mcmc.seed,
    };
    println!(
        "evidence {:.6e} +/- {:.2e} ({} prior draws, kernel {})",
        report.estimate, report.std_error, report.draws, report.kernel
    );
    if let Some(dir) = &args.out {
        let text = serde_json_string(&report)?;
        bvm_core::report::write_text(dir, "evidence.json", &text)
            .map_err(|e| CliError::Runtime(format!("io: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))
}

fn cmd_select(args: SelectArgs) -> Result<ExitCode, CliError> {
    let env = env_seed()?;
    let load = |path: &Path| -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
    };
    let mut config_a = load(&args.config_a)?;
    let mut config_b = load(&args.config_b)?;
    if let Some(seed) = args.seed.or(env) {
        config_a.mcmc.seed = seed;
        config_b.mcmc.seed = seed;
    }
    let run_a = prepare(&config_a)?;
    let run_b = prepare(&config_b)?;

    // Apples to apples: same data, same agreement definition.
    if run_a.data.content_hash() != run_b.data.content_hash() {
        return Err(CliError::Config(
            "refusing comparison: the two configs use different datasets".into(),
        ));
    }
    if run_a.kernel.agreement_signature() != run_b.kernel.agreement_signature() {
        return Err(CliError::Config(
            "refusing comparison: the two configs use different agreement definitions".into(),
        ));
    }

    let draws = args.evidence_draws.unwrap_or(DEFAULT_EVIDENCE_DRAWS);
    let ev_a = run_evidence(&run_a, draws)?;
    let ev_b = run_evidence(&run_b, draws)?;
    let factor =
        bvm_factor(ev_a.estimate, ev_b.estimate).map_err(|e| CliError::Runtime(e.to_string()))?;
    let (factor_value, decisive, favored) = match factor {
        BvmFactor::Ratio(r) => {
            let favored = if r > 1.0 {
                run_a.label.clone()
            } else if r < 1.0 {
                run_b.label.clone()
            } else {
                "neither (tie)".into()
            };
            (Some(r), false, favored)
        }
        BvmFactor::DecisivelyFavorsFirst => (None, true, run_a.label.clone()),
    };
    let report = SelectionReport {
        model_a: run_a.label.clone(),
        model_b: run_b.label.clone(),
        evidence_a: ev_a.estimate,
        evidence_b: ev_b.estimate,
        std_error_a: ev_a.std_error,
        std_error_b: ev_b.std_error,
        factor: factor_value,
        decisive,
        favored: favored.clone(),
    };
    println!(
        "Z[{}] = {:.6e} +/- {:.2e}",
        report.model_a, report.evidence_a, report.std_error_a
    );
    println!(
        "Z[{}] = {:.6e} +/- {:.2e}",
        report.model_b, report.evidence_b, report.std_error_b
    );
    match factor_value {
        Some(r) => println!("factor = {r:.6}"),
        None => println!("factor = infinite ({} decisively favored)", report.favored),
    }
    println!("favored: {favored}");
    if let Some(dir) = &args.out {
        let text = serde_json_string(&report)?;
        bvm_core::report::write_text(dir, "selection.json", &text)
            .map_err(|e| CliError::Runtime(format!("io: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<ExitCode, CliError> {
    let env = env_seed()?;
    let seed = args.seed.or(env);
    let scenarios: Vec<Scenario> = scenarios_by_name(&args.name, seed)
        .ok_or_else(|| CliError::Config(format!("unknown study {:?}", args.name)))?;
    let mut all_pass = true;
    let mut reports = Vec::with_capacity(scenarios.len());
    for scenario in &scenarios {
        let report = run_scenario(scenario)?;
        for outcome in &report.outcomes {
            let verdict = if outcome.pass { "PASS" } else { "FAIL" };
            println!(
                "[{verdict}] {}/{}: measured {} (expected {})",
                report.scenario, outcome.check, outcome.measured, outcome.expected
            );
        }
        all_pass &= report.passed();
        reports.push(report);
    }
    if let Some(dir) = &args.out {
        for (scenario, report) in scenarios.iter().zip(&reports) {
            bvm_core::report::write_text(
                dir,
                &format!("{}-config.json", scenario.name),
                &scenario.to_json(),
            )
            .map_err(|e| CliError::Runtime(format!("io: {e}")))?;
            bvm_core::report::write_text(
                dir,
                &format!("{}-verdicts.json", scenario.name),
                &serde_json_string(report)?,
            )
            .map_err(|e| CliError::Runtime(format!("io: {e}")))?;
        }
    }
    println!(
        "{}: {}",
        args.name,
        if all_pass {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    );
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
