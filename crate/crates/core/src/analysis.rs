//! Post-processing over chains: predictive envelopes, posterior summaries,
//! evidence-ratio model selection, and the least-squares baseline.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::data::DataSet;
use crate::models::{ModelError, ParametricModel};
use crate::sampler::PosteriorChain;
use crate::scalar::{cast, Scalar};
use crate::stats;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("chain has {available} post-burn-in samples, need at least {needed}")]
    InsufficientSamples { available: usize, needed: usize },
    #[error("envelope subsample must be at least 30, got {0}")]
    SubsampleTooSmall(usize),
    #[error("model evaluation failed: {0}")]
    Model(#[from] ModelError),
    #[error("evidences are both zero; the comparison is undefined")]
    UndefinedComparison,
    #[error("evidence must be nonnegative, got {0}")]
    NegativeEvidence(f64),
    #[error("least squares failed: {0}")]
    LeastSquares(String),
}

/// Mean model response with symmetric band half-widths at one, two, and
/// three sample standard deviations of the posterior response spread.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveEnvelope<F: Scalar> {
    pub grid: Vec<F>,
    /// Model evaluated at the posterior-mean parameters.
    pub mean_response: Vec<F>,
    pub half_width_1: Vec<F>,
    pub half_width_2: Vec<F>,
    pub half_width_3: Vec<F>,
    pub subsample_size: usize,
}

impl<F: Scalar> PredictiveEnvelope<F> {
    /// True when `(x, y)` lies inside the band at the given level (1..=3),
    /// judged at the nearest grid point.
    pub fn contains(&self, x: F, y: F, level: usize) -> bool {
        let hw = match level {
            1 => &self.half_width_1,
            2 => &self.half_width_2,
            _ => &self.half_width_3,
        };
        let mut best = 0usize;
        let mut best_d = F::infinity();
        for (i, &gx) in self.grid.iter().enumerate() {
            let d = (gx - x).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        (y - self.mean_response[best]).abs() <= hw[best]
    }
}

/// Evenly spaced grid over the data's input range, extended 5% on each side.
pub fn default_grid<F: Scalar>(data: &DataSet<F>, points: usize) -> Vec<F> {
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &x in data.inputs() {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let span = hi - lo;
    let pad = span * cast(0.05);
    let (lo, hi) = (lo - pad, hi + pad);
    let n = points.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * cast(i as f64) / cast(n as f64 - 1.0))
        .collect()
}

/// Build the predictive envelope from a chain.
///
/// Response curves are evaluated for `subsample` post-burn-in states drawn
/// without replacement; the mean response uses the posterior-mean parameters
/// and the level-k half-width at each grid point is k times the sample sd of
/// the subsampled responses there.
pub fn predictive_envelope<F: Scalar, R: Rng + ?Sized>(
    chain: &PosteriorChain<F>,
    model: &dyn ParametricModel<F>,
    grid: &[F],
    subsample: usize,
    rng: &mut R,
) -> Result<PredictiveEnvelope<F>, AnalysisError> {
    if subsample < 30 {
        return Err(AnalysisError::SubsampleTooSmall(subsample));
    }
    let post = chain.post_burn_in();
    if post.len() < subsample {
        return Err(AnalysisError::InsufficientSamples {
            available: post.len(),
            needed: subsample,
        });
    }
    let mean_params = chain.posterior_mean_params();
    let mean_response: Vec<F> = grid
        .iter()
        .map(|&x| model.evaluate(x, &mean_params))
        .collect::<Result<_, _>>()?;

    let picks = rand::seq::index::sample(rng, post.len(), subsample);
    let mut responses: Vec<Vec<F>> = vec![Vec::with_capacity(subsample); grid.len()];
    for idx in picks {
        let params = &post[idx].state[..chain.model_dim];
        for (slot, &x) in responses.iter_mut().zip(grid) {
            slot.push(model.evaluate(x, params)?);
        }
    }

    let mut half_width_1 = Vec::with_capacity(grid.len());
    let mut half_width_2 = Vec::with_capacity(grid.len());
    let mut half_width_3 = Vec::with_capacity(grid.len());
    for values in &responses {
        let sd = stats::sample_sd(values);
        half_width_1.push(sd);
        half_width_2.push(sd * cast(2.0));
        half_width_3.push(sd * cast(3.0));
    }
    Ok(PredictiveEnvelope {
        grid: grid.to_vec(),
        mean_response,
        half_width_1,
        half_width_2,
        half_width_3,
        subsample_size: subsample,
    })
}

/// Moment and percentile summaries of the post-burn-in chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PosteriorSummary<F: Scalar> {
    pub param_names: Vec<String>,
    pub means: Vec<F>,
    pub sds: Vec<F>,
    pub p2_5: Vec<F>,
    pub medians: Vec<F>,
    pub p97_5: Vec<F>,
    /// Pearson correlations, unit diagonal, symmetric.
    pub correlation: Vec<Vec<F>>,
    pub sample_count: usize,
}

/// Summarize a chain; requires at least 100 post-burn-in samples.
pub fn posterior_summary<F: Scalar>(
    chain: &PosteriorChain<F>,
    param_names: &[String],
) -> Result<PosteriorSummary<F>, AnalysisError> {
    let post = chain.post_burn_in();
    if post.len() < 100 {
        return Err(AnalysisError::InsufficientSamples {
            available: post.len(),
            needed: 100,
        });
    }
    let dim = post[0].state.len();
    let columns: Vec<Vec<F>> = (0..dim)
        .map(|d| post.iter().map(|s| s.state[d]).collect())
        .collect();
    let means: Vec<F> = columns.iter().map(|c| stats::mean(c)).collect();
    let sds: Vec<F> = columns.iter().map(|c| stats::sample_sd(c)).collect();
    let p2_5: Vec<F> = columns
        .iter()
        .map(|c| stats::percentile(c, cast(2.5)))
        .collect();
    let medians: Vec<F> = columns
        .iter()
        .map(|c| stats::percentile(c, cast(50.0)))
        .collect();
    let p97_5: Vec<F> = columns
        .iter()
        .map(|c| stats::percentile(c, cast(97.5)))
        .collect();
    let mut correlation = vec![vec![F::zero(); dim]; dim];
    for i in 0..dim {
        correlation[i][i] = F::one();
        for j in (i + 1)..dim {
            let r = stats::correlation(&columns[i], &columns[j]);
            correlation[i][j] = r;
            correlation[j][i] = r;
        }
    }
    let mut names: Vec<String> = param_names.to_vec();
    while names.len() < dim {
        names.push(format!("latent{}", names.len() - param_names.len() + 1));
    }
    Ok(PosteriorSummary {
        param_names: names,
        means,
        sds,
        p2_5,
        medians,
        p97_5,
        correlation,
        sample_count: post.len(),
    })
}

/// Outcome of comparing two evidences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BvmFactor<F: Scalar> {
    /// `Z1 / Z2`; values above 1 favor the first model under equal prior odds.
    Ratio(F),
    /// `Z2 == 0 < Z1`: the first model is decisively favored.
    DecisivelyFavorsFirst,
}

/// Evidence ratio of two models scored under the same agreement definition.
pub fn bvm_factor<F: Scalar>(z1: F, z2: F) -> Result<BvmFactor<F>, AnalysisError> {
    for z in [z1, z2] {
        if z < F::zero() {
            return Err(AnalysisError::NegativeEvidence(
                z.to_f64().unwrap_or(f64::NAN),
            ));
        }
    }
    if z2 > F::zero() {
        Ok(BvmFactor::Ratio(z1 / z2))
    } else if z1 > F::zero() {
        Ok(BvmFactor::DecisivelyFavorsFirst)
    } else {
        Err(AnalysisError::UndefinedComparison)
    }
}

/// Options for the derivative-free least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquaresOptions<F: Scalar> {
    pub max_iterations: usize,
    /// Convergence threshold on the simplex objective spread.
    pub tolerance: F,
    /// Total starts: the plain init plus jittered restarts.
    pub starts: usize,
    /// Relative jitter applied to restart positions.
    pub jitter: F,
    pub seed: u64,
}

impl<F: Scalar> Default for LeastSquaresOptions<F> {
    fn default() -> Self {
        Self {
            max_iterations: 4000,
            tolerance: cast(1e-12),
            starts: 8,
            jitter: cast(0.25),
            seed: 0x5ead,
        }
    }
}

/// A converged least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit<F: Scalar> {
    pub params: Vec<F>,
    pub objective: F,
}

/// Minimize the squared-residual objective against the dataset's central
/// values with Nelder-Mead simplex descent and jittered multi-start.
/// Candidates with non-finite objectives are rejected; if every start fails
/// the fit errors out.
pub fn least_squares_fit<F: Scalar>(
    model: &dyn ParametricModel<F>,
    data: &DataSet<F>,
    init: &[F],
    options: &LeastSquaresOptions<F>,
) -> Result<LeastSquaresFit<F>, AnalysisError> {
    if init.len() != model.dim() {
        return Err(AnalysisError::Model(ModelError::DimensionMismatch {
            expected: model.dim(),
            got: init.len(),
        }));
    }
    let centers = data.centers();
    let objective = |params: &[F]| -> F {
        let mut total = F::zero();
        for (&x, &y) in data.inputs().iter().zip(&centers) {
            match model.evaluate(x, params) {
                Ok(yhat) if yhat.is_finite() => {
                    let r = yhat - y;
                    total += r * r;
                }
                _ => return F::infinity(),
            }
        }
        total
    };

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
    let mut best: Option<LeastSquaresFit<F>> = None;
    for start_idx in 0..options.starts.max(1) {
        let start: Vec<F> = if start_idx == 0 {
            init.to_vec()
        } else {
            init.iter()
                .map(|&v| {
                    let scale = v.abs().max(F::one()) * options.jitter;
                    v + scale * F::standard_normal(&mut rng)
                })
                .collect()
        };
        if let Some(fit) = nelder_mead(&objective, &start, options) {
            match &best {
                Some(b) if b.objective <= fit.objective => {}
                _ => best = Some(fit),
            }
        }
    }
    best.ok_or_else(|| {
        AnalysisError::LeastSquares("objective was non-finite at every start".into())
    })
}

/// Standard Nelder-Mead with reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5. Returns None when no vertex ever had a finite objective.
fn nelder_mead<F: Scalar>(
    objective: &dyn Fn(&[F]) -> F,
    start: &[F],
    options: &LeastSquaresOptions<F>,
) -> Option<LeastSquaresFit<F>> {
    let dim = start.len();
    let mut simplex: Vec<(Vec<F>, F)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), objective(start)));
    for d in 0..dim {
        let mut v = start.to_vec();
        let step = v[d].abs().max(F::one()) * cast(0.05);
        v[d] += step;
        let f = objective(&v);
        simplex.push((v, f));
    }
    if simplex.iter().all(|(_, f)| !f.is_finite()) {
        return None;
    }

    let half: F = cast(0.5);
    let two: F = cast(2.0);
    for _ in 0..options.max_iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective ordering"));
        let best_f = simplex[0].1;
        let worst_f = simplex[dim].1;
        if best_f.is_finite()
            && worst_f.is_finite()
            && worst_f - best_f <= options.tolerance * (best_f.abs() + options.tolerance)
        {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![F::zero(); dim];
        for (v, _) in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        let n: F = cast(dim as f64);
        for c in &mut centroid {
            *c /= n;
        }

        let worst = simplex[dim].0.clone();
        let reflect: Vec<F> = centroid
            .iter()
            .zip(&worst)
            .map(|(&c, &w)| c + (c - w))
            .collect();
        let f_reflect = objective(&reflect);

        if f_reflect < simplex[0].1 {
            let expand: Vec<F> = centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| c + two * (c - w))
                .collect();
            let f_expand = objective(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
        } else {
            let contract: Vec<F> = centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| c + half * (w - c))
                .collect();
            let f_contract = objective(&contract);
            if f_contract < simplex[dim].1 {
                simplex[dim] = (contract, f_contract);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for (v, f) in &mut simplex[1..] {
                    for (x, &b) in v.iter_mut().zip(&best) {
                        *x = b + half * (*x - b);
                    }
                    *f = objective(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective ordering"));
    let (params, objective) = simplex.swap_remove(0);
    objective
        .is_finite()
        .then_some(LeastSquaresFit { params, objective })
}
