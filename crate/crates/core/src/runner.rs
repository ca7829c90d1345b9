//! Turn a validated [`RunConfig`] into a prepared run, execute the
//! calibration pipeline (chain, summary, envelope, evidence), and write the
//! artifacts plus the reproducibility manifest.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{
    default_grid, posterior_summary, predictive_envelope, AnalysisError, PosteriorSummary,
    PredictiveEnvelope,
};
use crate::config::{ConfigError, RunConfig};
use crate::data::{DataError, DataFormat, DataSet};
use crate::likelihood::LikelihoodKernel;
use crate::models::{model_by_name, ParametricModel};
use crate::report::{chain_to_csv, envelope_to_csv, write_text, OutputFiles, RunManifest};
use crate::sampler::{
    estimate_evidence, run_mcmc, EvidenceEstimate, McmcConfig, PosteriorChain, Prior, SamplerError,
};
use crate::scenarios;

pub const DEFAULT_EVIDENCE_DRAWS: usize = 10_000;
pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_ENVELOPE_SUBSAMPLE: usize = 500;

/// RNG stream salts so evidence, envelope, and chain draws never alias.
const EVIDENCE_SALT: u64 = 0x6576_6964;
const ENVELOPE_SALT: u64 = 0x656e_7665;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("dataset error: {0}")]
    Data(#[from] DataError),
    #[error("infeasible start: {0}")]
    Infeasible(SamplerError),
    #[error("sampler error: {0}")]
    Sampler(SamplerError),
    #[error("analysis error: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<SamplerError> for RunError {
    fn from(err: SamplerError) -> Self {
        match err {
            SamplerError::InfeasibleStart { .. } => RunError::Infeasible(err),
            other => RunError::Sampler(other),
        }
    }
}

/// A config resolved into runtime objects, ready to execute.
pub struct PreparedRun {
    pub label: String,
    pub data: DataSet<f64>,
    pub model: Arc<dyn ParametricModel<f64>>,
    pub prior: Prior<f64>,
    pub kernel: LikelihoodKernel<f64>,
    pub mcmc: McmcConfig<f64>,
    pub grid_points: usize,
    pub envelope_subsample: usize,
    pub evidence_draws: usize,
    /// Config echo used for manifests and reruns.
    pub config: RunConfig,
}

impl PreparedRun {
    /// Parameter names in chain-state order (latent slot last, if any).
    pub fn state_names(&self) -> Vec<String> {
        let mut names = self.model.param_names();
        if self.kernel.requires_latent() {
            names.push("latent_c".into());
        }
        names
    }
}

/// Resolve the dataset source: a file path, a named scenario's embedded
/// data, or inline data.
pub fn resolve_dataset(config: &RunConfig) -> Result<DataSet<f64>, RunError> {
    config.dataset.validate()?;
    if let Some(path) = &config.dataset.path {
        let format = config.dataset.format.unwrap_or_else(|| {
            if Path::new(path).extension().is_some_and(|e| e == "json") {
                DataFormat::Json
            } else {
                DataFormat::Csv
            }
        });
        return Ok(DataSet::load(path, format)?);
    }
    if let Some(name) = &config.dataset.scenario {
        return scenarios::scenario_dataset(name, config.mcmc.seed).ok_or_else(|| {
            RunError::Config(ConfigError::Invalid(format!(
                "unknown scenario dataset {name:?}"
            )))
        });
    }
    let inline = config
        .dataset
        .inline
        .clone()
        .expect("validated dataset source");
    // Inline data arrives through serde, which skips the constructors.
    inline.revalidate()?;
    Ok(inline)
}

/// Validate a config and resolve every piece into runtime objects.
pub fn prepare_run(config: &RunConfig) -> Result<PreparedRun, RunError> {
    let data = resolve_dataset(config)?;
    let model = model_by_name::<f64>(&config.model)
        .ok_or_else(|| ConfigError::UnknownModel(config.model.clone()))?;
    let prior = config.build_prior()?;
    let kernel = config.kernel.build()?;

    let expected_dim = model.dim() + usize::from(kernel.requires_latent());
    if prior.dim() != expected_dim {
        return Err(RunError::Config(ConfigError::Invalid(format!(
            "prior has {} components but model {:?} needs {} (including any latent slot)",
            prior.dim(),
            config.model,
            expected_dim
        ))));
    }

    let envelope = config.envelope.clone().unwrap_or_default();
    Ok(PreparedRun {
        label: config
            .label
            .clone()
            .unwrap_or_else(|| format!("{}-run", config.model)),
        data,
        model,
        prior,
        kernel,
        mcmc: config.mcmc.build(),
        grid_points: envelope.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
        envelope_subsample: envelope.subsample.unwrap_or(DEFAULT_ENVELOPE_SUBSAMPLE),
        evidence_draws: config.evidence_draws.unwrap_or(DEFAULT_EVIDENCE_DRAWS),
        config: config.clone(),
    })
}

/// Everything a calibration run produces, before serialization.
pub struct CalibrationOutcome {
    pub chain: PosteriorChain<f64>,
    pub summary: PosteriorSummary<f64>,
    pub envelope: PredictiveEnvelope<f64>,
    pub evidence: EvidenceEstimate<f64>,
    pub wall_time_seconds: f64,
}

/// Run the full calibration pipeline for a prepared run.
pub fn run_calibration(run: &PreparedRun) -> Result<CalibrationOutcome, RunError> {
    let start = Instant::now();
    let chain = run_mcmc(
        &run.kernel,
        &run.prior,
        run.model.as_ref(),
        &run.data,
        &run.mcmc,
    )?;

    let summary = posterior_summary(&chain, &run.state_names())?;

    let grid = default_grid(&run.data, run.grid_points);
    let subsample = run.envelope_subsample.min(chain.post_burn_in().len());
    let mut env_rng = ChaCha8Rng::seed_from_u64(run.mcmc.seed ^ ENVELOPE_SALT);
    let envelope = predictive_envelope(&chain, run.model.as_ref(), &grid, subsample, &mut env_rng)?;

    let evidence = run_evidence(run, run.evidence_draws)?;

    Ok(CalibrationOutcome {
        chain,
        summary,
        envelope,
        evidence,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Prior Monte Carlo evidence with the run's own seed stream, so a
/// standalone estimate matches the one recorded in a calibration manifest.
pub fn run_evidence(run: &PreparedRun, draws: usize) -> Result<EvidenceEstimate<f64>, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(run.mcmc.seed ^ EVIDENCE_SALT);
    Ok(estimate_evidence(
        &run.kernel,
        &run.prior,
        run.model.as_ref(),
        &run.data,
        draws,
        &mut rng,
    )?)
}

/// Write chain CSV, summary JSON, envelope CSV, and the manifest into
/// `out_dir`, returning the manifest.
pub fn write_calibration_artifacts(
    run: &PreparedRun,
    outcome: &CalibrationOutcome,
    out_dir: &Path,
) -> Result<RunManifest, RunError> {
    let outputs = OutputFiles::default();
    write_text(
        out_dir,
        &outputs.chain_csv,
        &chain_to_csv(&outcome.chain, &run.state_names()),
    )?;
    write_text(
        out_dir,
        &outputs.summary_json,
        &serde_json::to_string_pretty(&outcome.summary).expect("summary serialization"),
    )?;
    write_text(
        out_dir,
        &outputs.envelope_csv,
        &envelope_to_csv(&outcome.envelope),
    )?;

    let manifest = RunManifest {
        config: run.config.clone(),
        seed: run.mcmc.seed,
        dataset_hash: run.data.content_hash(),
        evidence_estimate: outcome.evidence.estimate,
        evidence_std_error: outcome.evidence.std_error,
        evidence_draws: outcome.evidence.draws,
        acceptance_rate: outcome.chain.acceptance_rate(),
        post_burn_in_samples: outcome.chain.post_burn_in().len(),
        wall_time_seconds: outcome.wall_time_seconds,
        outputs,
    };
    write_text(out_dir, "manifest.json", &manifest.to_json())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DatasetSourceConfig, KernelConfig, McmcSettings, PriorComponentConfig};

    fn line_config() -> RunConfig {
        let data =
            DataSet::certain("line", vec![0.0, 1.0, 2.0, 3.0], vec![0.9, 0.3, 1.1, 0.5]).unwrap();
        RunConfig {
            label: Some("line-test".into()),
            dataset: DatasetSourceConfig::inline(data),
            model: "linear2".into(),
            prior: vec![
                PriorComponentConfig::gaussian(0.0, 1.0),
                PriorComponentConfig::gaussian(0.5, 1.0),
            ],
            kernel: KernelConfig::with_epsilon("bvm_certain_eps", 0.6),
            mcmc: McmcSettings {
                iterations: 2000,
                burn_in_fraction: 0.1,
                seed: 31,
                proposal_scales: None,
                initial_state: None,
            },
            output_dir: None,
            envelope: None,
            evidence_draws: Some(2000),
        }
    }

    #[test]
    fn prepare_checks_prior_dimension() {
        let mut config = line_config();
        config.prior.pop();
        match prepare_run(&config) {
            Err(RunError::Config(ConfigError::Invalid(msg))) => {
                assert!(msg.contains("prior"), "{msg}");
            }
            other => panic!(
                "expected config error, got {:?}",
                other.err().map(|e| e.to_string())
            ),
        }
    }

    #[test]
    fn invalid_inline_dataset_is_rejected_at_prepare() {
        // serde lets an invalid observation into the config; prepare must not
        let mut config = line_config();
        config.dataset.inline = Some(
            serde_json::from_str(
                r#"{"label": "bad", "inputs": [1.0],
                    "observations": [{"kind": "gaussian", "mean": 0.0, "sigma": -1.0}]}"#,
            )
            .unwrap(),
        );
        match prepare_run(&config) {
            Err(RunError::Data(DataError::NonPositiveSigma { .. })) => {}
            other => panic!(
                "expected sigma validation error, got {:?}",
                other.err().map(|e| e.to_string())
            ),
        }
    }

    #[test]
    fn calibration_pipeline_produces_artifacts() {
        let config = line_config();
        let run = prepare_run(&config).unwrap();
        let outcome = run_calibration(&run).unwrap();
        assert!(outcome.evidence.estimate > 0.0);
        assert_eq!(outcome.envelope.grid.len(), DEFAULT_GRID_POINTS);

        let dir = tempfile::tempdir().unwrap();
        let manifest = write_calibration_artifacts(&run, &outcome, dir.path()).unwrap();
        assert_eq!(manifest.seed, 31);
        assert!(dir.path().join("chain.csv").exists());
        assert!(dir.path().join("posterior_summary.json").exists());
        assert!(dir.path().join("envelope.csv").exists());
        assert!(dir.path().join("manifest.json").exists());

        // manifest round-trips and reruns to an identical chain CSV
        let loaded = RunManifest::load(dir.path().join("manifest.json")).unwrap();
        assert_eq!(loaded.config, config);
        let rerun = run_calibration(&prepare_run(&loaded.config).unwrap()).unwrap();
        assert_eq!(
            chain_to_csv(&outcome.chain, &run.state_names()),
            chain_to_csv(&rerun.chain, &run.state_names())
        );
    }
}
