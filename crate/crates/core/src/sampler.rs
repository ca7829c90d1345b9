//! Random-walk Metropolis-Hastings over parameter space, prior Monte Carlo
//! evidence estimation, posterior-averaged reliability scoring, and tolerance
//! auto-tuning.
//!
//! The chain state is the model parameter vector, optionally extended by one
//! latent slot (the agreement band half-width) when the kernel's Boolean has
//! a coverage clause. Proposals are independent per-coordinate Gaussian
//! steps; acceptance is computed in log space, and a state with zero
//! likelihood is never accepted, so every recorded step has a finite log
//! likelihood. A single chain is sequential; independent chains can run
//! concurrently, each owning its generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::DataSet;
use crate::likelihood::{LikelihoodError, LikelihoodKernel};
use crate::models::ParametricModel;
use crate::scalar::{cast, Scalar};
use crate::stats;

/// Attempts at drawing a feasible start from the prior before giving up.
pub const FEASIBLE_START_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error(
        "no feasible starting state after {attempts} prior draws; \
         best candidate {best_params:?} missed by max residual {best_miss:.6e} \
         (the regression admits no solution at this agreement definition)"
    )]
    InfeasibleStart {
        attempts: usize,
        best_params: Vec<f64>,
        best_miss: f64,
    },
    #[error("prior dimension {prior} does not match model dimension {model} plus latent {latent}")]
    DimensionMismatch {
        prior: usize,
        model: usize,
        latent: usize,
    },
    #[error("proposal scales must be positive and one per state coordinate")]
    BadProposalScales,
    #[error("iterations must be >= 1")]
    NoIterations,
    #[error("burn-in fraction must lie in [0, 1), got {0}")]
    BadBurnIn(f64),
    #[error("chain has {available} post-burn-in samples, need {needed}")]
    InsufficientSamples { available: usize, needed: usize },
    #[error("evidence draws must be >= 1")]
    NoDraws,
    #[error("epsilon grid must be non-empty and strictly ascending")]
    BadGrid,
    #[error("no grid tolerance reached the target acceptance window; pilot results: {table}")]
    TuningFailed { table: String },
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error("prior component {index}: {message}")]
    BadPrior { index: usize, message: String },
}

/// One independent prior component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorComponent<F: Scalar> {
    Gaussian { mean: F, sd: F },
    Uniform { low: F, high: F },
}

impl<F: Scalar> PriorComponent<F> {
    fn validate(&self, index: usize) -> Result<(), SamplerError> {
        match *self {
            PriorComponent::Gaussian { sd, .. } if sd <= F::zero() => Err(SamplerError::BadPrior {
                index,
                message: format!("gaussian sd must be > 0, got {sd}"),
            }),
            PriorComponent::Uniform { low, high } if low >= high => Err(SamplerError::BadPrior {
                index,
                message: format!("uniform prior needs low < high, got [{low}, {high}]"),
            }),
            _ => Ok(()),
        }
    }

    fn ln_density(&self, value: F) -> F {
        match *self {
            PriorComponent::Gaussian { mean, sd } => stats::ln_normal_pdf(value, mean, sd),
            PriorComponent::Uniform { low, high } => {
                if value >= low && value <= high {
                    -(high - low).ln()
                } else {
                    F::neg_infinity()
                }
            }
        }
    }

    fn mean(&self) -> F {
        match *self {
            PriorComponent::Gaussian { mean, .. } => mean,
            PriorComponent::Uniform { low, high } => (low + high) / cast(2.0),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        match *self {
            PriorComponent::Gaussian { mean, sd } => mean + sd * F::standard_normal(rng),
            PriorComponent::Uniform { low, high } => low + (high - low) * F::unit_uniform(rng),
        }
    }

    /// Default random-walk step: 5% of the prior sd, or range/20 for uniform.
    fn default_proposal_scale(&self) -> F {
        match *self {
            PriorComponent::Gaussian { sd, .. } => sd / cast(20.0),
            PriorComponent::Uniform { low, high } => (high - low) / cast(20.0),
        }
    }
}

/// Independent product prior over the chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior<F: Scalar> {
    components: Vec<PriorComponent<F>>,
}

impl<F: Scalar> Prior<F> {
    pub fn new(components: Vec<PriorComponent<F>>) -> Result<Self, SamplerError> {
        for (i, c) in components.iter().enumerate() {
            c.validate(i)?;
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PriorComponent<F>] {
        &self.components
    }

    pub fn ln_density(&self, state: &[F]) -> F {
        debug_assert_eq!(state.len(), self.components.len());
        let mut total = F::zero();
        for (c, &v) in self.components.iter().zip(state) {
            total += c.ln_density(v);
            if total == F::neg_infinity() {
                return total;
            }
        }
        total
    }

    /// Prior mean (midpoint for uniform components): the default chain start.
    pub fn mean_point(&self) -> Vec<F> {
        self.components.iter().map(PriorComponent::mean).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F> {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }

    pub fn default_proposal_scales(&self) -> Vec<F> {
        self.components
            .iter()
            .map(PriorComponent::default_proposal_scale)
            .collect()
    }
}

/// Chain configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig<F: Scalar> {
    pub iterations: usize,
    /// Fraction of the chain flagged as burn-in, in [0, 1).
    pub burn_in_fraction: F,
    /// Per-coordinate proposal standard deviations; defaults derive from the prior.
    pub proposal_scales: Option<Vec<F>>,
    /// Explicit starting state. Default is the prior mean; scenarios with
    /// needle-shaped feasible regions supply a precomputed start instead.
    pub initial_state: Option<Vec<F>>,
    pub seed: u64,
}

impl<F: Scalar> McmcConfig<F> {
    pub fn new(iterations: usize, burn_in_fraction: F, seed: u64) -> Self {
        Self {
            iterations,
            burn_in_fraction,
            proposal_scales: None,
            initial_state: None,
            seed,
        }
    }

    fn validate(&self) -> Result<(), SamplerError> {
        if self.iterations == 0 {
            return Err(SamplerError::NoIterations);
        }
        if self.burn_in_fraction < F::zero() || self.burn_in_fraction >= F::one() {
            return Err(SamplerError::BadBurnIn(
                self.burn_in_fraction.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(())
    }
}

/// One recorded chain step: the state after the accept/reject decision.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep<F: Scalar> {
    pub state: Vec<F>,
    pub ln_likelihood: F,
    pub accepted: bool,
}

/// A completed chain. Step 0 is the initial state; burn-in steps are kept
/// but flagged through `burn_in_cutoff` so diagnostics can see the full path.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorChain<F: Scalar> {
    pub steps: Vec<ChainStep<F>>,
    pub accepted: usize,
    pub proposed: usize,
    pub burn_in_cutoff: usize,
    pub seed: u64,
    /// Model-parameter count; states may carry one extra latent slot.
    pub model_dim: usize,
}

impl<F: Scalar> PosteriorChain<F> {
    pub fn acceptance_rate(&self) -> F {
        if self.proposed == 0 {
            return F::zero();
        }
        cast::<F>(self.accepted as f64) / cast(self.proposed as f64)
    }

    pub fn post_burn_in(&self) -> &[ChainStep<F>] {
        &self.steps[self.burn_in_cutoff..]
    }

    /// Accepted-move count restricted to post-burn-in steps.
    pub fn post_burn_in_accepted(&self) -> usize {
        self.post_burn_in().iter().filter(|s| s.accepted).count()
    }

    /// Mean state over post-burn-in steps.
    pub fn posterior_mean_state(&self) -> Vec<F> {
        let post = self.post_burn_in();
        let dim = self.steps[0].state.len();
        let mut mean = vec![F::zero(); dim];
        for step in post {
            for (m, &v) in mean.iter_mut().zip(&step.state) {
                *m += v;
            }
        }
        let n: F = cast(post.len() as f64);
        for m in &mut mean {
            *m /= n;
        }
        mean
    }

    /// Posterior-mean model parameters (latent slot excluded).
    pub fn posterior_mean_params(&self) -> Vec<F> {
        let mut mean = self.posterior_mean_state();
        mean.truncate(self.model_dim);
        mean
    }

    /// Posterior-mean latent half-width, when the state carries one.
    pub fn posterior_mean_latent(&self) -> Option<F> {
        if self.steps[0].state.len() > self.model_dim {
            Some(self.posterior_mean_state()[self.model_dim])
        } else {
            None
        }
    }
}

fn split_state<F: Scalar>(state: &[F], model_dim: usize) -> (&[F], Option<F>) {
    if state.len() > model_dim {
        (&state[..model_dim], Some(state[model_dim]))
    } else {
        (state, None)
    }
}

/// Kernel evaluation that treats model-evaluation failures (implicit solves
/// with no root, singularities) as zero likelihood instead of aborting.
fn ln_likelihood_or_reject<F: Scalar, R: Rng + ?Sized>(
    kernel: &LikelihoodKernel<F>,
    model: &dyn ParametricModel<F>,
    state: &[F],
    model_dim: usize,
    data: &DataSet<F>,
    rng: &mut R,
) -> Result<F, SamplerError> {
    let (params, latent) = split_state(state, model_dim);
    match kernel.ln_likelihood(model, params, latent, data, rng) {
        Ok(v) => Ok(if v.is_nan() { F::neg_infinity() } else { v }),
        Err(LikelihoodError::Model(_)) => Ok(F::neg_infinity()),
        Err(other) => Err(SamplerError::Likelihood(other)),
    }
}

/// Largest absolute deviation between model outputs and observation centers;
/// used to report how close an infeasible search came.
fn max_abs_residual<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Option<f64> {
    let predicted = model.evaluate_all(data.inputs(), params).ok()?;
    let mut worst = F::zero();
    for (yhat, obs) in predicted.iter().zip(data.observations()) {
        let r = (*yhat - obs.center()).abs();
        if r > worst {
            worst = r;
        }
    }
    worst.to_f64()
}

/// Run a random-walk Metropolis-Hastings chain.
///
/// The chain starts at the prior mean; if that state has zero likelihood, up
/// to [`FEASIBLE_START_ATTEMPTS`] prior draws are tried. Failing that, the
/// run reports an infeasible start carrying the nearest miss seen, which is
/// the generalization of "the evidence is zero" to chain form.
pub fn run_mcmc<F: Scalar>(
    kernel: &LikelihoodKernel<F>,
    prior: &Prior<F>,
    model: &dyn ParametricModel<F>,
    data: &DataSet<F>,
    cfg: &McmcConfig<F>,
) -> Result<PosteriorChain<F>, SamplerError> {
    cfg.validate()?;
    let latent = usize::from(kernel.requires_latent());
    let model_dim = model.dim();
    if prior.dim() != model_dim + latent {
        return Err(SamplerError::DimensionMismatch {
            prior: prior.dim(),
            model: model_dim,
            latent,
        });
    }
    let scales = match &cfg.proposal_scales {
        Some(s) => {
            if s.len() != prior.dim() || s.iter().any(|&v| !v.is_finite() || v <= F::zero()) {
                return Err(SamplerError::BadProposalScales);
            }
            s.clone()
        }
        None => prior.default_proposal_scales(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Feasible start: the configured state (default prior mean) first, then
    // prior draws.
    let mut state = match &cfg.initial_state {
        Some(start) => {
            if start.len() != prior.dim() {
                return Err(SamplerError::DimensionMismatch {
                    prior: prior.dim(),
                    model: model_dim,
                    latent,
                });
            }
            start.clone()
        }
        None => prior.mean_point(),
    };
    let mut ln_lik = ln_likelihood_or_reject(kernel, model, &state, model_dim, data, &mut rng)?;
    if prior.ln_density(&state) == F::neg_infinity() {
        // A configured start outside the prior support is never usable.
        ln_lik = F::neg_infinity();
    }
    if ln_lik == F::neg_infinity() {
        let mut best_miss = f64::INFINITY;
        let mut best_params: Vec<f64> = Vec::new();
        let mut found = false;
        for _ in 0..FEASIBLE_START_ATTEMPTS {
            let candidate = prior.sample(&mut rng);
            let cand_lik =
                ln_likelihood_or_reject(kernel, model, &candidate, model_dim, data, &mut rng)?;
            if cand_lik > F::neg_infinity() {
                state = candidate;
                ln_lik = cand_lik;
                found = true;
                break;
            }
            let (params, _) = split_state(&candidate, model_dim);
            if let Some(miss) = max_abs_residual(model, params, data) {
                if miss < best_miss {
                    best_miss = miss;
                    best_params = params
                        .iter()
                        .map(|v| v.to_f64().unwrap_or(f64::NAN))
                        .collect();
                }
            }
        }
        if !found {
            return Err(SamplerError::InfeasibleStart {
                attempts: FEASIBLE_START_ATTEMPTS,
                best_params,
                best_miss,
            });
        }
    }

    let mut ln_prior = prior.ln_density(&state);
    let mut steps = Vec::with_capacity(cfg.iterations + 1);
    steps.push(ChainStep {
        state: state.clone(),
        ln_likelihood: ln_lik,
        accepted: true,
    });

    let mut accepted = 0usize;
    let mut proposal = vec![F::zero(); state.len()];
    for _ in 0..cfg.iterations {
        for ((p, &s), &scale) in proposal.iter_mut().zip(&state).zip(&scales) {
            *p = s + scale * F::standard_normal(&mut rng);
        }
        let cand_prior = prior.ln_density(&proposal);
        let mut accept = false;
        if cand_prior > F::neg_infinity() {
            let cand_lik =
                ln_likelihood_or_reject(kernel, model, &proposal, model_dim, data, &mut rng)?;
            if cand_lik > F::neg_infinity() {
                let log_ratio = cand_lik + cand_prior - (ln_lik + ln_prior);
                if log_ratio >= F::zero() || F::unit_uniform(&mut rng).ln() < log_ratio {
                    state.copy_from_slice(&proposal);
                    ln_lik = cand_lik;
                    ln_prior = cand_prior;
                    accept = true;
                }
            }
        }
        if accept {
            accepted += 1;
        }
        steps.push(ChainStep {
            state: state.clone(),
            ln_likelihood: ln_lik,
            accepted: accept,
        });
    }

    let burn = (cfg.burn_in_fraction * cast(cfg.iterations as f64))
        .round()
        .to_usize()
        .unwrap_or(0)
        .min(steps.len() - 1);
    Ok(PosteriorChain {
        steps,
        accepted,
        proposed: cfg.iterations,
        burn_in_cutoff: burn,
        seed: cfg.seed,
        model_dim,
    })
}

/// Prior Monte Carlo evidence estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceEstimate<F: Scalar> {
    pub estimate: F,
    pub std_error: F,
    pub draws: usize,
}

/// Estimate the evidence as the prior-averaged likelihood:
/// `(1/N) * sum L(state_i)` over prior draws. For agreement kernels the
/// summands are probabilities, so the estimate lies in [0, 1].
pub fn estimate_evidence<F: Scalar, R: Rng + ?Sized>(
    kernel: &LikelihoodKernel<F>,
    prior: &Prior<F>,
    model: &dyn ParametricModel<F>,
    data: &DataSet<F>,
    draws: usize,
    rng: &mut R,
) -> Result<EvidenceEstimate<F>, SamplerError> {
    if draws == 0 {
        return Err(SamplerError::NoDraws);
    }
    let latent = usize::from(kernel.requires_latent());
    let model_dim = model.dim();
    if prior.dim() != model_dim + latent {
        return Err(SamplerError::DimensionMismatch {
            prior: prior.dim(),
            model: model_dim,
            latent,
        });
    }
    let mut sum = F::zero();
    let mut sum_sq = F::zero();
    for _ in 0..draws {
        let state = prior.sample(rng);
        let ln = ln_likelihood_or_reject(kernel, model, &state, model_dim, data, rng)?;
        let value = if ln == F::neg_infinity() {
            F::zero()
        } else {
            ln.exp()
        };
        sum += value;
        sum_sq += value * value;
    }
    let n: F = cast(draws as f64);
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(F::zero());
    let std_error = (variance / n).sqrt();
    Ok(EvidenceEstimate {
        estimate: mean,
        std_error,
        draws,
    })
}

/// Posterior-averaged probability of agreement: the mean kernel likelihood
/// over a without-replacement subsample of post-burn-in states. Used as the
/// validation-stage reliability measure.
pub fn reliability_score<F: Scalar, R: Rng + ?Sized>(
    kernel: &LikelihoodKernel<F>,
    chain: &PosteriorChain<F>,
    model: &dyn ParametricModel<F>,
    data: &DataSet<F>,
    subsample: usize,
    rng: &mut R,
) -> Result<F, SamplerError> {
    let post = chain.post_burn_in();
    if post.len() < subsample || subsample == 0 {
        return Err(SamplerError::InsufficientSamples {
            available: post.len(),
            needed: subsample.max(1),
        });
    }
    let picks = rand::seq::index::sample(rng, post.len(), subsample);
    let mut sum = F::zero();
    for idx in picks {
        let ln =
            ln_likelihood_or_reject(kernel, model, &post[idx].state, chain.model_dim, data, rng)?;
        if ln > F::neg_infinity() {
            sum += ln.exp();
        }
    }
    Ok(sum / cast(subsample as f64))
}

/// One row of the tolerance tuning table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceTuneRow<F: Scalar> {
    pub epsilon: F,
    pub acceptance_rate: F,
    /// Prior-averaged likelihood using draws shared across the grid, so this
    /// column is exactly nondecreasing in epsilon.
    pub mean_likelihood: F,
}

/// Full tuning report: one row per grid tolerance plus the selected value.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceTuneReport<F: Scalar> {
    pub rows: Vec<ToleranceTuneRow<F>>,
    pub selected: Option<F>,
}

const TUNE_PRIOR_DRAWS: usize = 1000;

/// Walk an ascending tolerance grid and pick the smallest epsilon whose pilot
/// chain (10% of the configured iterations) lands inside the target
/// acceptance window. Grid points whose chains cannot even start count as
/// zero acceptance.
pub fn auto_tune_tolerance<F: Scalar>(
    kernel_for: impl Fn(F) -> LikelihoodKernel<F>,
    prior: &Prior<F>,
    model: &dyn ParametricModel<F>,
    data: &DataSet<F>,
    cfg: &McmcConfig<F>,
    acceptance_window: (F, F),
    epsilon_grid: &[F],
) -> Result<ToleranceTuneReport<F>, SamplerError> {
    if epsilon_grid.is_empty() || epsilon_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SamplerError::BadGrid);
    }
    let pilot = McmcConfig {
        iterations: (cfg.iterations / 10).max(1),
        ..cfg.clone()
    };
    // Common prior draws across the grid (pointwise monotone mean likelihood).
    let mut draw_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x746f_6c5f_6772_6964);
    let states: Vec<Vec<F>> = (0..TUNE_PRIOR_DRAWS)
        .map(|_| prior.sample(&mut draw_rng))
        .collect();

    let mut rows = Vec::with_capacity(epsilon_grid.len());
    let mut selected = None;
    for &eps in epsilon_grid {
        let kernel = kernel_for(eps);
        let acceptance_rate = match run_mcmc(&kernel, prior, model, data, &pilot) {
            Ok(chain) => chain.acceptance_rate(),
            Err(SamplerError::InfeasibleStart { .. }) => F::zero(),
            Err(other) => return Err(other),
        };
        let mut mean_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6d65_616e);
        let mut sum = F::zero();
        for state in &states {
            let ln =
                ln_likelihood_or_reject(&kernel, model, state, model.dim(), data, &mut mean_rng)?;
            if ln > F::neg_infinity() {
                sum += ln.exp();
            }
        }
        let mean_likelihood = sum / cast(TUNE_PRIOR_DRAWS as f64);
        rows.push(ToleranceTuneRow {
            epsilon: eps,
            acceptance_rate,
            mean_likelihood,
        });
        if selected.is_none()
            && acceptance_rate >= acceptance_window.0
            && acceptance_rate <= acceptance_window.1
        {
            selected = Some(eps);
        }
    }
    if selected.is_none() {
        let table = rows
            .iter()
            .map(|r| format!("eps={} rate={:.3}", r.epsilon, r.acceptance_rate))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(SamplerError::TuningFailed { table });
    }
    Ok(ToleranceTuneReport { rows, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{model_by_name, MonodModel};

    fn monod_table_data() -> DataSet<f64> {
        DataSet::certain(
            "growth",
            vec![28.0, 55.0, 83.0, 110.0, 138.0, 225.0, 375.0],
            vec![0.053, 0.060, 0.112, 0.105, 0.099, 0.122, 0.125],
        )
        .unwrap()
    }

    fn monod_prior() -> Prior<f64> {
        Prior::new(vec![
            PriorComponent::Gaussian {
                mean: 0.17,
                sd: 0.025,
            },
            PriorComponent::Gaussian {
                mean: 47.5,
                sd: 3.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn flat_likelihood_recovers_the_prior() {
        let prior = Prior::new(vec![
            PriorComponent::Gaussian { mean: 1.5, sd: 0.5 },
            PriorComponent::Uniform {
                low: -1.0,
                high: 3.0,
            },
        ])
        .unwrap();
        let data = DataSet::certain("d", vec![0.0], vec![0.0]).unwrap();
        let model = model_by_name::<f64>("linear2").unwrap();
        // wide proposals keep the autocorrelation time short
        let cfg = McmcConfig {
            iterations: 30_000,
            burn_in_fraction: 0.1,
            proposal_scales: Some(vec![0.5, 1.0]),
            initial_state: None,
            seed: 424242,
        };
        let chain = run_mcmc(&LikelihoodKernel::Flat, &prior, model.as_ref(), &data, &cfg).unwrap();
        assert!(chain.post_burn_in().len() >= 10_000);
        let mean = chain.posterior_mean_state();
        // Monte Carlo error with autocorrelation: allow ~3 effective SEs.
        assert!((mean[0] - 1.5).abs() < 0.05, "mean {:?}", mean);
        assert!((mean[1] - 1.0).abs() < 0.12, "mean {:?}", mean);
    }

    #[test]
    fn chains_are_bitwise_reproducible() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let kernel = LikelihoodKernel::certain_eps(0.03);
        let cfg = McmcConfig::new(500, 0.1, 7);
        let a = run_mcmc(&kernel, &prior, &model, &data, &cfg).unwrap();
        let b = run_mcmc(&kernel, &prior, &model, &data, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_tolerance_reports_nearest_miss() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        // below the feasibility threshold (~0.017) no parameters satisfy the Boolean
        let kernel = LikelihoodKernel::certain_eps(0.01);
        let cfg = McmcConfig::new(100, 0.1, 1);
        match run_mcmc(&kernel, &prior, &model, &data, &cfg) {
            Err(SamplerError::InfeasibleStart {
                attempts,
                best_params,
                best_miss,
            }) => {
                assert_eq!(attempts, FEASIBLE_START_ATTEMPTS);
                assert_eq!(best_params.len(), 2);
                assert!(best_miss > 0.01 && best_miss < 0.2, "miss {best_miss}");
            }
            other => panic!("expected infeasible start, got {other:?}"),
        }
    }

    #[test]
    fn stored_loglikelihoods_are_finite_and_acceptance_rate_in_range() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let kernel = LikelihoodKernel::certain_eps(0.03);
        let cfg = McmcConfig::new(2000, 0.2, 3);
        let chain = run_mcmc(&kernel, &prior, &model, &data, &cfg).unwrap();
        assert!(chain.steps.iter().all(|s| s.ln_likelihood.is_finite()));
        let rate = chain.acceptance_rate();
        assert!((0.0..=1.0).contains(&rate));
        assert_eq!(chain.steps.len(), 2001);
        assert_eq!(chain.burn_in_cutoff, 400);
    }

    #[test]
    fn trivial_evidence_values() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let flat = estimate_evidence(
            &LikelihoodKernel::Flat,
            &prior,
            &model,
            &data,
            1000,
            &mut rng,
        )
        .unwrap();
        assert_eq!(flat.estimate, 1.0);
        assert_eq!(flat.std_error, 0.0);

        let impossible = estimate_evidence(
            &LikelihoodKernel::certain_eps(0.0),
            &prior,
            &model,
            &data,
            1000,
            &mut rng,
        )
        .unwrap();
        assert_eq!(impossible.estimate, 0.0);
    }

    #[test]
    fn evidence_reproducible_across_seeds_within_error() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let kernel = LikelihoodKernel::certain_eps(0.03);
        let mut estimates = Vec::new();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = estimate_evidence(&kernel, &prior, &model, &data, 20_000, &mut rng).unwrap();
            assert!(e.estimate > 0.0);
            estimates.push(e);
        }
        let first = estimates[0];
        for other in &estimates[1..] {
            let combined = (first.std_error.powi(2) + other.std_error.powi(2)).sqrt();
            assert!(
                (first.estimate - other.estimate).abs() <= 3.0 * combined,
                "estimates {} vs {} combined SE {}",
                first.estimate,
                other.estimate,
                combined
            );
        }
    }

    #[test]
    fn reliability_is_one_for_indicator_kernel_on_feasible_chain() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let kernel = LikelihoodKernel::certain_eps(0.03);
        let cfg = McmcConfig::new(2000, 0.1, 11);
        let chain = run_mcmc(&kernel, &prior, &model, &data, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let score = reliability_score(&kernel, &chain, &model, &data, 500, &mut rng).unwrap();
        assert_eq!(score, 1.0);
        // asking for more samples than exist is an error
        assert!(matches!(
            reliability_score(&kernel, &chain, &model, &data, 10_000, &mut rng),
            Err(SamplerError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn tuning_skips_infeasible_grid_points() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let cfg = McmcConfig::new(2000, 0.1, 13);
        let report = auto_tune_tolerance(
            LikelihoodKernel::certain_eps,
            &prior,
            &model,
            &data,
            &cfg,
            (0.01, 0.95),
            &[0.01, 0.02, 0.03],
        )
        .unwrap();
        let eps = report.selected.unwrap();
        assert!(eps == 0.02 || eps == 0.03, "selected {eps}");
        assert_eq!(report.rows[0].acceptance_rate, 0.0);
        // shared prior draws make the mean-likelihood column monotone
        assert!(report
            .rows
            .windows(2)
            .all(|w| w[0].mean_likelihood <= w[1].mean_likelihood));
    }

    #[test]
    fn tuning_fails_with_all_infeasible_grid() {
        let prior = monod_prior();
        let data = monod_table_data();
        let model = MonodModel;
        let cfg = McmcConfig::new(500, 0.1, 13);
        let err = auto_tune_tolerance(
            LikelihoodKernel::certain_eps,
            &prior,
            &model,
            &data,
            &cfg,
            (0.1, 0.5),
            &[0.001, 0.005, 0.01],
        )
        .unwrap_err();
        assert!(matches!(err, SamplerError::TuningFailed { .. }));
    }
}
