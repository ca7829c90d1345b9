//! Canned, seed-reproducible study configurations plus the success/failure
//! matrix, shared by the test suite and the CLI `reproduce` command.
//!
//! Each scenario bundles a full [`RunConfig`] (so it exports to the same JSON
//! schema the CLI accepts) with machine-checkable expected outcomes. Every
//! embedded constant carries a provenance note describing where the numbers
//! come from.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agreement::{AgreementSpec, COVERAGE_HIGH, COVERAGE_LOW};
use crate::analysis::{default_grid, least_squares_fit, predictive_envelope, LeastSquaresOptions};
use crate::config::{
    AgreementConfig, DatasetSourceConfig, KernelConfig, McmcSettings, PriorComponentConfig,
    RunConfig,
};
use crate::data::{DataSet, UncertainObservation};
use crate::likelihood::bvm_monte_carlo;
use crate::models::{model_by_name, toy_generator_mean};
use crate::runner::{prepare_run, PreparedRun, RunError};
use crate::sampler::{estimate_evidence, reliability_score, run_mcmc, PosteriorChain};
use crate::stats;

const RELIABILITY_SALT: u64 = 0x7265_6c69;
const EVIDENCE_CHECK_SALT: u64 = 0x6368_6b65;
const ENVELOPE_CHECK_SALT: u64 = 0x7363_656e;
const BOOTSTRAP_SALT: u64 = 0x6273_7472;
const TOY_START_SALT: u64 = 0x7374_6172;

/// Default seed for scenarios that do not intrinsically need one.
pub const DEFAULT_SCENARIO_SEED: u64 = 2025;

/// A machine-checkable expectation attached to a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum ExpectedOutcome {
    /// Prior Monte Carlo evidence is strictly positive.
    EvidencePositive { draws: usize },
    /// Prior Monte Carlo evidence is exactly zero.
    EvidenceZero { draws: usize },
    /// The chain cannot find a feasible starting state.
    InfeasibleStart,
    /// At least this many accepted post-burn-in moves.
    AcceptedAtLeast { count: usize },
    /// Least squares from the prior mean recovers the target parameters.
    LeastSquaresTarget { target: Vec<f64>, rel_tol: f64 },
    /// Posterior-averaged agreement probability inside [low, high].
    ReliabilityInWindow {
        low: f64,
        high: f64,
        subsample: usize,
    },
    /// Every data point inside the level-k predictive band at its input.
    EnvelopeCoversData { level: usize },
    /// 1-sigma half-widths nondecreasing across an ascending epsilon grid at
    /// a minimum fraction of grid points.
    EnvelopeWidensWithEpsilon {
        epsilons: Vec<f64>,
        min_fraction: f64,
    },
    /// The posterior-mean model (with its latent band half-width) satisfies
    /// the mean-absolute-error and coverage clauses on the dataset centers.
    CompoundBooleanOnMeans { mean_epsilon: f64 },
    /// Least squares yields a point estimate whose data-resampling spread is
    /// exactly zero (certain data admits no distribution).
    PointEstimateNoSpread { resamples: usize },
    /// Least squares yields a point estimate with positive resampling spread.
    PointEstimateWithSpread { resamples: usize },
}

/// A runnable study: config plus expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    /// Where the embedded constants come from.
    pub provenance: Vec<String>,
    pub config: RunConfig,
    pub checks: Vec<ExpectedOutcome>,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// One evaluated expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub expected: String,
    pub measured: String,
    pub pass: bool,
}

/// All evaluated expectations of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }
}

// ---------------------------------------------------------------------------
// Embedded datasets
// ---------------------------------------------------------------------------

/// Bioreactor steady-state growth observations: substrate concentration
/// (mg/L COD) against measured growth rate (1/h).
pub fn monod_dataset() -> DataSet<f64> {
    DataSet::certain(
        "bacterial-growth",
        vec![28.0, 55.0, 83.0, 110.0, 138.0, 225.0, 375.0],
        vec![0.053, 0.060, 0.112, 0.105, 0.099, 0.122, 0.125],
    )
    .expect("embedded dataset is valid")
}

/// Lap-joint energy dissipation measurements: force amplitude (lbf) against
/// energy loss per cycle (lbf*in), five loading levels.
pub fn smallwood_dataset() -> DataSet<f64> {
    DataSet::certain(
        "lap-joint-energy",
        vec![60.0, 120.0, 180.0, 240.0, 320.0],
        vec![5.30e-5, 2.85e-4, 7.78e-4, 1.55e-3, 2.50e-3],
    )
    .expect("embedded dataset is valid")
}

/// Number of generated toy observations (evenly spaced on [0, 3]).
pub const TOY_POINTS: usize = 60;
/// Epistemic measurement sd wrapped around each generated toy value.
pub const TOY_EPISTEMIC_SD: f64 = 0.5;

/// Synthetic oscillatory dataset: smooth generator plus piecewise aleatoric
/// noise (sd 0.4 below x = 1.5, sd 0.6 above), each point wrapped as a
/// Gaussian observation with epistemic sd 0.5. Deterministic given the seed.
pub fn toy_dataset(seed: u64) -> DataSet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(TOY_POINTS);
    let mut observations = Vec::with_capacity(TOY_POINTS);
    for i in 0..TOY_POINTS {
        let x = 3.0 * i as f64 / (TOY_POINTS - 1) as f64;
        let aleatoric_sd = if x <= 1.5 { 0.4 } else { 0.6 };
        let noise: f64 = aleatoric_sd * rng.sample::<f64, _>(rand_distr::StandardNormal);
        let y = toy_generator_mean(x) + noise;
        inputs.push(x);
        observations
            .push(UncertainObservation::gaussian(y, TOY_EPISTEMIC_SD).expect("positive sd"));
    }
    DataSet::new("toy-oscillatory", inputs, observations).expect("generated dataset is valid")
}

fn matrix_gaussian_dataset() -> DataSet<f64> {
    let obs = [0.85, 1.15, 1.55, 2.05]
        .iter()
        .map(|&m| UncertainObservation::gaussian(m, 0.25).expect("positive sd"))
        .collect();
    DataSet::new("matrix-gaussian", vec![0.0, 1.0, 2.0, 3.0], obs).expect("valid")
}

/// Alternating disjoint intervals no straight line can thread: climbing from
/// [0.8, 1.0] to [0.0, 0.2] forces slope <= -0.6 while the return to
/// [0.8, 1.0] forces slope >= +0.6.
fn matrix_uniform_dataset() -> DataSet<f64> {
    let intervals = [(0.8, 1.0), (0.0, 0.2), (0.8, 1.0), (0.0, 0.2)];
    let obs = intervals
        .iter()
        .map(|&(lo, hi)| UncertainObservation::uniform(lo, hi).expect("valid interval"))
        .collect();
    DataSet::new("matrix-uniform", vec![0.0, 1.0, 2.0, 3.0], obs).expect("valid")
}

fn matrix_certain_dataset() -> DataSet<f64> {
    DataSet::certain(
        "matrix-certain",
        vec![0.0, 1.0, 2.0, 3.0],
        vec![0.9, 0.3, 1.1, 0.5],
    )
    .expect("valid")
}

/// Dataset behind a scenario name, for configs using a scenario source.
pub fn scenario_dataset(name: &str, seed: u64) -> Option<DataSet<f64>> {
    match name {
        "monod" => Some(monod_dataset()),
        "smallwood" => Some(smallwood_dataset()),
        "toy" => Some(toy_dataset(seed)),
        "matrix_gaussian" => Some(matrix_gaussian_dataset()),
        "matrix_uniform" => Some(matrix_uniform_dataset()),
        "matrix_certain" => Some(matrix_certain_dataset()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Scenario builders
// ---------------------------------------------------------------------------

/// Saturating-growth calibration on certain data with the epsilon Boolean.
pub fn scenario_monod() -> Scenario {
    Scenario {
        name: "monod".into(),
        description: "saturating growth model on certain observations, \
                      epsilon-Boolean agreement at 0.03"
            .into(),
        provenance: vec![
            "dataset: bioreactor steady-state growth observations (7 levels)".into(),
            "priors: gaussian around a least-squares-informed center, user-chosen spreads".into(),
            "reference least-squares solution: alpha1 = 0.14542, alpha2 = 49.053".into(),
        ],
        config: RunConfig {
            label: Some("monod".into()),
            dataset: DatasetSourceConfig::inline(monod_dataset()),
            model: "monod".into(),
            prior: vec![
                PriorComponentConfig::gaussian(0.17, 0.025),
                PriorComponentConfig::gaussian(47.5, 3.0),
            ],
            kernel: KernelConfig::with_epsilon("bvm_certain_eps", 0.03),
            mcmc: McmcSettings {
                iterations: 10_000,
                burn_in_fraction: 0.1,
                seed: DEFAULT_SCENARIO_SEED,
                proposal_scales: None,
                initial_state: None,
            },
            output_dir: None,
            envelope: None,
            evidence_draws: Some(100_000),
        },
        checks: vec![
            ExpectedOutcome::LeastSquaresTarget {
                target: vec![0.14542, 49.053],
                rel_tol: 1e-3,
            },
            ExpectedOutcome::EvidencePositive { draws: 100_000 },
            ExpectedOutcome::AcceptedAtLeast { count: 1000 },
            ExpectedOutcome::EnvelopeWidensWithEpsilon {
                epsilons: vec![0.02, 0.025, 0.03],
                min_fraction: 0.9,
            },
        ],
    }
}

/// Latent half-width prior range for the compound Boolean. The cap keeps
/// the agreement band near the data's own spread; the coverage clause alone
/// is nearly flat in the half-width over a wide plateau, so an uncapped
/// prior drifts toward bands that swallow every observation.
pub const TOY_LATENT_LOW: f64 = 0.05;
pub const TOY_LATENT_HIGH: f64 = 1.5;
/// Compound-Boolean mean-absolute-error threshold.
pub const TOY_MEAN_EPSILON: f64 = 0.7;

/// Deterministic starting state for the compound-Boolean chain: a
/// least-squares prefit against the dataset centers, completed by scanning
/// the latent half-width for the most probable agreement. The feasible
/// region of this Boolean is a needle in the 7-dimensional prior; starting
/// from the prior mean (or from prior draws) almost never reaches it.
///
/// The squared-error surface is multimodal in the two frequency parameters,
/// so the prefit sweeps a coarse frequency grid and polishes each cell.
fn toy_initial_state(data: &DataSet<f64>, seed: u64) -> Option<Vec<f64>> {
    let model = model_by_name::<f64>("toy6").expect("registered model");
    let mut best_fit: Option<crate::analysis::LeastSquaresFit<f64>> = None;
    for (i, &freq_a) in [8.75, 9.25, 9.75, 10.25].iter().enumerate() {
        for (j, &freq_b) in [8.75, 9.25, 9.75, 10.25].iter().enumerate() {
            let options = LeastSquaresOptions {
                starts: 2,
                max_iterations: 2500,
                jitter: 0.1,
                seed: seed ^ TOY_START_SALT ^ ((i * 4 + j) as u64),
                ..Default::default()
            };
            let init = [0.5, 0.5, 0.5, freq_a, 0.5, freq_b];
            if let Ok(fit) = least_squares_fit(model.as_ref(), data, &init, &options) {
                if best_fit
                    .as_ref()
                    .is_none_or(|b| fit.objective < b.objective)
                {
                    best_fit = Some(fit);
                }
            }
        }
    }
    let fit = best_fit?;
    let spec = AgreementSpec::MeanEpsilonCoverage {
        mean_epsilon: TOY_MEAN_EPSILON,
    };
    let mut best: Option<(f64, f64)> = None;
    for i in 0..40 {
        let c = TOY_LATENT_LOW + (TOY_LATENT_HIGH - TOY_LATENT_LOW) * (i as f64 + 0.5) / 40.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TOY_START_SALT);
        let p = bvm_monte_carlo(
            model.as_ref(),
            &fit.params,
            data,
            &spec,
            Some(c),
            50,
            &mut rng,
        )
        .ok()?;
        if p > 0.0 && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((c, p));
        }
    }
    let (c, _) = best?;
    let mut state = fit.params;
    state.push(c);
    Some(state)
}

/// Compound-Boolean calibration of the oscillatory toy model against
/// generated mixed-uncertainty data, via the Monte Carlo likelihood.
pub fn scenario_toy(seed: u64) -> Scenario {
    Scenario {
        name: "toy".into(),
        description: "six-parameter oscillatory model, compound Boolean \
                      (mean absolute error plus 91-99% band coverage), \
                      Monte Carlo likelihood with 50 replications"
            .into(),
        provenance: vec![
            format!("dataset: generated oscillatory observations, seed {seed}"),
            "aleatoric noise sd 0.4 on [0, 1.5] and 0.6 on (1.5, 3]; epistemic sd 0.5".into(),
            "priors: gaussian, means (0,0,0,9,0,9), sds (1,1,1,0.5,1,0.5)".into(),
            "latent band half-width: uniform prior on [0.05, 3.0] (artifact choice)".into(),
        ],
        config: {
            let data = toy_dataset(seed);
            let initial_state = toy_initial_state(&data, seed);
            RunConfig {
                label: Some("toy".into()),
                dataset: DatasetSourceConfig::inline(data),
                model: "toy6".into(),
                prior: vec![
                    PriorComponentConfig::gaussian(0.0, 1.0),
                    PriorComponentConfig::gaussian(0.0, 1.0),
                    PriorComponentConfig::gaussian(0.0, 1.0),
                    PriorComponentConfig::gaussian(9.0, 0.5),
                    PriorComponentConfig::gaussian(0.0, 1.0),
                    PriorComponentConfig::gaussian(9.0, 0.5),
                    PriorComponentConfig::uniform(TOY_LATENT_LOW, TOY_LATENT_HIGH),
                ],
                kernel: KernelConfig {
                    kernel: "bvm_monte_carlo".into(),
                    epsilon: None,
                    agreement: Some(AgreementConfig::mean_epsilon_coverage(0.7)),
                    replications: Some(50),
                },
                mcmc: McmcSettings {
                    iterations: 5000,
                    burn_in_fraction: 0.1,
                    seed,
                    proposal_scales: None,
                    initial_state,
                },
                output_dir: None,
                envelope: None,
                evidence_draws: Some(10_000),
            }
        },
        checks: vec![
            ExpectedOutcome::AcceptedAtLeast { count: 200 },
            ExpectedOutcome::CompoundBooleanOnMeans {
                mean_epsilon: TOY_MEAN_EPSILON,
            },
        ],
    }
}

/// Lap-joint energy dissipation calibration on certain data.
pub fn scenario_smallwood() -> Scenario {
    Scenario {
        name: "smallwood".into(),
        description: "three-parameter energy dissipation model on certain \
                      measurements, epsilon-Boolean agreement at 1e-3"
            .into(),
        provenance: vec![
            "dataset: lap-joint energy dissipation at five force amplitudes".into(),
            "priors: m ~ N(1.20, 0.09^2), log10(k_n) ~ N(5.61, 0.40^2), \
             k ~ N(1172700, 13760^2)"
                .into(),
            "reliability window 0.93 +/- 0.07 around the reference score".into(),
        ],
        config: RunConfig {
            label: Some("smallwood".into()),
            dataset: DatasetSourceConfig::inline(smallwood_dataset()),
            model: "smallwood".into(),
            prior: vec![
                PriorComponentConfig::gaussian(1.20, 0.09),
                PriorComponentConfig::gaussian(5.61, 0.40),
                PriorComponentConfig::gaussian(1_172_700.0, 13_760.0),
            ],
            kernel: KernelConfig::with_epsilon("bvm_certain_eps", 1e-3),
            mcmc: McmcSettings {
                iterations: 10_000,
                burn_in_fraction: 0.2,
                seed: DEFAULT_SCENARIO_SEED,
                proposal_scales: None,
                initial_state: None,
            },
            output_dir: None,
            envelope: None,
            evidence_draws: Some(10_000),
        },
        checks: vec![
            ExpectedOutcome::AcceptedAtLeast { count: 1000 },
            ExpectedOutcome::ReliabilityInWindow {
                low: 0.86,
                high: 1.0,
                subsample: 500,
            },
            ExpectedOutcome::EnvelopeCoversData { level: 1 },
        ],
    }
}

/// The nine (data kind x method) cells of the success/failure matrix on a
/// straight-line model.
pub fn scenario_matrix() -> Vec<Scenario> {
    let line_prior = vec![
        PriorComponentConfig::gaussian(0.0, 1.0),
        PriorComponentConfig::gaussian(0.5, 1.0),
    ];
    let mcmc = |seed: u64| McmcSettings {
        iterations: 5000,
        burn_in_fraction: 0.1,
        seed,
        proposal_scales: None,
        initial_state: None,
    };
    let base = |name: &str,
                data: DataSet<f64>,
                kernel: KernelConfig,
                seed: u64,
                checks: Vec<ExpectedOutcome>,
                description: &str| Scenario {
        name: name.into(),
        description: description.into(),
        provenance: vec![
            "constructed line-fitting cells for the data-kind by method matrix".into(),
        ],
        config: RunConfig {
            label: Some(name.into()),
            dataset: DatasetSourceConfig::inline(data),
            model: "linear2".into(),
            prior: line_prior.clone(),
            kernel,
            mcmc: mcmc(seed),
            output_dir: None,
            envelope: None,
            evidence_draws: Some(20_000),
        },
        checks,
    };

    vec![
        base(
            "matrix_gaussian_bvm",
            matrix_gaussian_dataset(),
            KernelConfig::with_epsilon("bvm_gaussian_eps", 0.5),
            101,
            vec![ExpectedOutcome::AcceptedAtLeast { count: 1000 }],
            "agreement regression succeeds on infinite-tail data",
        ),
        base(
            "matrix_gaussian_classic",
            matrix_gaussian_dataset(),
            KernelConfig::plain("classic_gaussian"),
            102,
            vec![
                ExpectedOutcome::AcceptedAtLeast { count: 1000 },
                ExpectedOutcome::EvidencePositive { draws: 20_000 },
            ],
            "classical regression succeeds on infinite-tail data",
        ),
        base(
            "matrix_gaussian_least_squares",
            matrix_gaussian_dataset(),
            KernelConfig::with_epsilon("bvm_gaussian_eps", 0.5),
            103,
            vec![ExpectedOutcome::PointEstimateWithSpread { resamples: 50 }],
            "least squares succeeds on infinite-tail data (spread from resampling)",
        ),
        base(
            "matrix_uniform_bvm",
            matrix_uniform_dataset(),
            KernelConfig::with_epsilon("bvm_uniform_eps", 0.5),
            104,
            vec![ExpectedOutcome::AcceptedAtLeast { count: 1000 }],
            "agreement regression succeeds on truncated data no line can thread",
        ),
        base(
            "matrix_uniform_classic",
            matrix_uniform_dataset(),
            KernelConfig::plain("classic_uniform"),
            105,
            vec![
                ExpectedOutcome::EvidenceZero { draws: 20_000 },
                ExpectedOutcome::InfeasibleStart,
            ],
            "classical regression fails on truncated data (zero evidence)",
        ),
        base(
            "matrix_uniform_least_squares",
            matrix_uniform_dataset(),
            KernelConfig::with_epsilon("bvm_uniform_eps", 0.5),
            106,
            vec![ExpectedOutcome::PointEstimateWithSpread { resamples: 50 }],
            "least squares succeeds on truncated data (spread from resampling)",
        ),
        base(
            "matrix_certain_bvm",
            matrix_certain_dataset(),
            KernelConfig::with_epsilon("bvm_certain_eps", 0.6),
            107,
            vec![ExpectedOutcome::AcceptedAtLeast { count: 1000 }],
            "agreement regression succeeds on completely certain data",
        ),
        base(
            "matrix_certain_classic",
            matrix_certain_dataset(),
            KernelConfig::plain("classic_certain"),
            108,
            vec![
                ExpectedOutcome::EvidenceZero { draws: 20_000 },
                ExpectedOutcome::InfeasibleStart,
            ],
            "classical regression fails on certain data (zero evidence)",
        ),
        base(
            "matrix_certain_least_squares",
            matrix_certain_dataset(),
            KernelConfig::with_epsilon("bvm_certain_eps", 0.6),
            109,
            vec![ExpectedOutcome::PointEstimateNoSpread { resamples: 50 }],
            "least squares on certain data: point estimate, no distribution",
        ),
    ]
}

/// Scenarios behind a reproduce name. Individual matrix cells resolve by
/// their full name (for example `matrix_uniform_classic`).
pub fn scenarios_by_name(name: &str, seed: Option<u64>) -> Option<Vec<Scenario>> {
    match name {
        "monod" => {
            let mut s = scenario_monod();
            if let Some(seed) = seed {
                s.config.mcmc.seed = seed;
            }
            Some(vec![s])
        }
        "toy" => Some(vec![scenario_toy(seed.unwrap_or(DEFAULT_SCENARIO_SEED))]),
        "smallwood" => {
            let mut s = scenario_smallwood();
            if let Some(seed) = seed {
                s.config.mcmc.seed = seed;
            }
            Some(vec![s])
        }
        "matrix" => {
            let mut all = scenario_matrix();
            if let Some(seed) = seed {
                for (i, s) in all.iter_mut().enumerate() {
                    s.config.mcmc.seed = seed.wrapping_add(i as u64);
                }
            }
            Some(all)
        }
        cell if cell.starts_with("matrix_") => {
            let mut s = scenario_matrix().into_iter().find(|s| s.name == cell)?;
            if let Some(seed) = seed {
                s.config.mcmc.seed = seed;
            }
            Some(vec![s])
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

type ChainResult = Result<PosteriorChain<f64>, RunError>;

fn ensure_chain<'a>(run: &PreparedRun, cache: &'a mut Option<ChainResult>) -> &'a ChainResult {
    if cache.is_none() {
        let result = run_mcmc(
            &run.kernel,
            &run.prior,
            run.model.as_ref(),
            &run.data,
            &run.mcmc,
        )
        .map_err(RunError::from);
        *cache = Some(result);
    }
    cache.as_ref().expect("just populated")
}

/// Evaluate every expectation of a scenario. Deterministic given the
/// scenario's seed.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport, RunError> {
    let run = prepare_run(&scenario.config)?;
    let mut chain_cache: Option<ChainResult> = None;
    let mut outcomes = Vec::with_capacity(scenario.checks.len());
    for check in &scenario.checks {
        outcomes.push(evaluate_check(&run, &mut chain_cache, check, scenario)?);
    }
    Ok(ScenarioReport {
        scenario: scenario.name.clone(),
        outcomes,
    })
}

fn evaluate_check(
    run: &PreparedRun,
    chain_cache: &mut Option<ChainResult>,
    check: &ExpectedOutcome,
    scenario: &Scenario,
) -> Result<CheckOutcome, RunError> {
    let seed = run.mcmc.seed;
    match check {
        ExpectedOutcome::EvidencePositive { draws } | ExpectedOutcome::EvidenceZero { draws } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ EVIDENCE_CHECK_SALT);
            let estimate = estimate_evidence(
                &run.kernel,
                &run.prior,
                run.model.as_ref(),
                &run.data,
                *draws,
                &mut rng,
            )?;
            let positive = matches!(check, ExpectedOutcome::EvidencePositive { .. });
            let pass = if positive {
                estimate.estimate > 0.0
            } else {
                estimate.estimate == 0.0
            };
            Ok(CheckOutcome {
                check: if positive {
                    "evidence_positive".into()
                } else {
                    "evidence_zero".into()
                },
                expected: if positive { "> 0".into() } else { "= 0".into() },
                measured: format!("{:.6e} +/- {:.2e}", estimate.estimate, estimate.std_error),
                pass,
            })
        }
        ExpectedOutcome::InfeasibleStart => {
            let measured = match ensure_chain(run, chain_cache) {
                Err(RunError::Infeasible(e)) => {
                    return Ok(CheckOutcome {
                        check: "infeasible_start".into(),
                        expected: "no feasible starting state".into(),
                        measured: e.to_string(),
                        pass: true,
                    })
                }
                Err(e) => format!("unexpected error: {e}"),
                Ok(chain) => format!(
                    "chain ran with acceptance rate {:.3}",
                    chain.acceptance_rate()
                ),
            };
            Ok(CheckOutcome {
                check: "infeasible_start".into(),
                expected: "no feasible starting state".into(),
                measured,
                pass: false,
            })
        }
        ExpectedOutcome::AcceptedAtLeast { count } => {
            let (measured, pass) = match ensure_chain(run, chain_cache) {
                Ok(chain) => {
                    let accepted = chain.post_burn_in_accepted();
                    (
                        format!("{accepted} accepted post-burn-in"),
                        accepted >= *count,
                    )
                }
                Err(e) => (format!("chain failed: {e}"), false),
            };
            Ok(CheckOutcome {
                check: "accepted_at_least".into(),
                expected: format!(">= {count} accepted post-burn-in"),
                measured,
                pass,
            })
        }
        ExpectedOutcome::LeastSquaresTarget { target, rel_tol } => {
            let init: Vec<f64> = run.prior.mean_point()[..run.model.dim()].to_vec();
            let fit = least_squares_fit(
                run.model.as_ref(),
                &run.data,
                &init,
                &LeastSquaresOptions::default(),
            )?;
            let rel_errs: Vec<f64> = fit
                .params
                .iter()
                .zip(target)
                .map(|(p, t)| (p - t).abs() / t.abs().max(f64::MIN_POSITIVE))
                .collect();
            let worst = rel_errs.iter().cloned().fold(0.0, f64::max);
            Ok(CheckOutcome {
                check: "least_squares_target".into(),
                expected: format!("{target:?} within {rel_tol:.0e} relative"),
                measured: format!("{:?} (worst rel err {:.2e})", fit.params, worst),
                pass: worst <= *rel_tol,
            })
        }
        ExpectedOutcome::ReliabilityInWindow {
            low,
            high,
            subsample,
        } => {
            let (measured, pass) = match ensure_chain(run, chain_cache) {
                Ok(chain) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ RELIABILITY_SALT);
                    let score = reliability_score(
                        &run.kernel,
                        chain,
                        run.model.as_ref(),
                        &run.data,
                        *subsample,
                        &mut rng,
                    )?;
                    (format!("{score:.4}"), (*low..=*high).contains(&score))
                }
                Err(e) => (format!("chain failed: {e}"), false),
            };
            Ok(CheckOutcome {
                check: "reliability_in_window".into(),
                expected: format!("[{low}, {high}]"),
                measured,
                pass,
            })
        }
        ExpectedOutcome::EnvelopeCoversData { level } => {
            let (measured, pass) = match ensure_chain(run, chain_cache) {
                Ok(chain) => {
                    let grid: Vec<f64> = run.data.inputs().to_vec();
                    let subsample = run.envelope_subsample.min(chain.post_burn_in().len());
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ENVELOPE_CHECK_SALT);
                    let envelope =
                        predictive_envelope(chain, run.model.as_ref(), &grid, subsample, &mut rng)?;
                    let centers = run.data.centers();
                    let covered = grid
                        .iter()
                        .zip(&centers)
                        .filter(|(&x, &y)| envelope.contains(x, y, *level))
                        .count();
                    (
                        format!("{covered} of {} points inside", grid.len()),
                        covered == grid.len(),
                    )
                }
                Err(e) => (format!("chain failed: {e}"), false),
            };
            Ok(CheckOutcome {
                check: "envelope_covers_data".into(),
                expected: format!("all points inside the {level}-sigma band"),
                measured,
                pass,
            })
        }
        ExpectedOutcome::EnvelopeWidensWithEpsilon {
            epsilons,
            min_fraction,
        } => {
            let mut widths: Vec<Vec<f64>> = Vec::with_capacity(epsilons.len());
            let grid = default_grid(&run.data, run.grid_points);
            for &eps in epsilons {
                let mut config = scenario.config.clone();
                config.kernel.override_epsilon(eps)?;
                let eps_run = prepare_run(&config)?;
                let chain = run_mcmc(
                    &eps_run.kernel,
                    &eps_run.prior,
                    eps_run.model.as_ref(),
                    &eps_run.data,
                    &eps_run.mcmc,
                )?;
                let subsample = eps_run.envelope_subsample.min(chain.post_burn_in().len());
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ENVELOPE_CHECK_SALT);
                let envelope = predictive_envelope(
                    &chain,
                    eps_run.model.as_ref(),
                    &grid,
                    subsample,
                    &mut rng,
                )?;
                widths.push(envelope.half_width_1);
            }
            let monotone = (0..grid.len())
                .filter(|&g| widths.windows(2).all(|w| w[0][g] <= w[1][g] + 1e-15))
                .count();
            let fraction = monotone as f64 / grid.len() as f64;
            Ok(CheckOutcome {
                check: "envelope_widens_with_epsilon".into(),
                expected: format!(
                    "1-sigma half-widths nondecreasing over {epsilons:?} at >= {:.0}% of grid points",
                    min_fraction * 100.0
                ),
                measured: format!("nondecreasing at {:.1}% of grid points", fraction * 100.0),
                pass: fraction >= *min_fraction,
            })
        }
        ExpectedOutcome::CompoundBooleanOnMeans { mean_epsilon } => {
            let (measured, pass) = match ensure_chain(run, chain_cache) {
                Ok(chain) => {
                    let params = chain.posterior_mean_params();
                    let c = chain
                        .posterior_mean_latent()
                        .expect("compound Boolean chains carry a latent slot");
                    let predicted = run
                        .model
                        .evaluate_all(run.data.inputs(), &params)
                        .map_err(crate::analysis::AnalysisError::Model)?;
                    let centers = run.data.centers();
                    let n = centers.len() as f64;
                    let mae: f64 = predicted
                        .iter()
                        .zip(&centers)
                        .map(|(yh, y)| (y - yh).abs())
                        .sum::<f64>()
                        / n;
                    let coverage = predicted
                        .iter()
                        .zip(&centers)
                        .filter(|(yh, y)| (*y - *yh).abs() <= c)
                        .count() as f64
                        / n;
                    let pass =
                        mae <= *mean_epsilon && (COVERAGE_LOW..=COVERAGE_HIGH).contains(&coverage);
                    (
                        format!("mae {mae:.4}, coverage {coverage:.4}, c {c:.4}"),
                        pass,
                    )
                }
                Err(e) => (format!("chain failed: {e}"), false),
            };
            Ok(CheckOutcome {
                check: "compound_boolean_on_means".into(),
                expected: format!(
                    "mae <= {mean_epsilon} and coverage in [{COVERAGE_LOW}, {COVERAGE_HIGH}]"
                ),
                measured,
                pass,
            })
        }
        ExpectedOutcome::PointEstimateNoSpread { resamples }
        | ExpectedOutcome::PointEstimateWithSpread { resamples } => {
            let want_spread = matches!(check, ExpectedOutcome::PointEstimateWithSpread { .. });
            let init: Vec<f64> = run.prior.mean_point()[..run.model.dim()].to_vec();
            let options = LeastSquaresOptions::default();
            let fit = least_squares_fit(run.model.as_ref(), &run.data, &init, &options)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ BOOTSTRAP_SALT);
            let mut resampled_params: Vec<Vec<f64>> = Vec::with_capacity(*resamples);
            for _ in 0..*resamples {
                let values: Vec<f64> = run
                    .data
                    .observations()
                    .iter()
                    .map(|obs| obs.sample(&mut rng))
                    .collect();
                let resampled = DataSet::certain("resample", run.data.inputs().to_vec(), values)
                    .expect("resampled dataset is valid");
                let refit =
                    least_squares_fit(run.model.as_ref(), &resampled, &fit.params, &options)?;
                resampled_params.push(refit.params);
            }
            let dim = fit.params.len();
            let spread = (0..dim)
                .map(|d| {
                    let column: Vec<f64> = resampled_params.iter().map(|p| p[d]).collect();
                    stats::sample_sd(&column)
                })
                .fold(0.0f64, f64::max);
            let pass = if want_spread {
                spread > 0.0
            } else {
                spread == 0.0
            };
            Ok(CheckOutcome {
                check: if want_spread {
                    "point_estimate_with_spread".into()
                } else {
                    "point_estimate_no_spread".into()
                },
                expected: if want_spread {
                    "resampling spread > 0 (a distribution exists)".into()
                } else {
                    "resampling spread exactly 0 (no distribution)".into()
                },
                measured: format!("fit {:?}, spread {:.3e}", fit.params, spread),
                pass,
            })
        }
    }
}
