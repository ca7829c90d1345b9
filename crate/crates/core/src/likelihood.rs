//! Likelihood kernels.
//!
//! Two families share one interface:
//!
//! * classic kernels score the probability (density) that the model output
//!   exactly reproduces the data: Gaussian density products, uniform
//!   indicator products, and the certain-data match flag;
//! * agreement kernels score the probability that the model output *agrees*
//!   with the data under a Boolean tolerance definition. For the epsilon
//!   Boolean these have closed forms (CDF differences for Gaussian data,
//!   interval intersections for uniform data, the plain indicator for
//!   certain data); arbitrary Booleans and mixed-kind data go through a
//!   Monte Carlo estimate that redraws the data from its own distribution.
//!
//! All kernels compute in log space; an exact zero is `-inf`. Agreement
//! kernels are probabilities, so their values stay in [0, 1] per point and
//! in product.

use rand::Rng;
use thiserror::Error;

use crate::agreement::{AgreementError, AgreementSpec, Tolerance};
use crate::data::{DataSet, UncertainObservation};
use crate::models::{ModelError, ParametricModel};
use crate::scalar::{cast, Scalar};
use crate::stats::{ln_normal_interval_prob, ln_normal_pdf};

/// Relative tolerance treated as "exactly equal" for certain-data matching.
pub const CERTAIN_MATCH_RTOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum LikelihoodError {
    #[error("kernel expects {expected} observations, found {found} at point {index}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
        index: usize,
    },
    #[error("model evaluation failed: {0}")]
    Model(#[from] ModelError),
    #[error("agreement error: {0}")]
    Agreement(#[from] AgreementError),
    #[error("monte carlo replications must be >= 1")]
    ZeroReplications,
    #[error("this kernel requires the latent interval half-width in the state")]
    MissingLatent,
}

fn require_gaussian<F: Scalar>(
    obs: &UncertainObservation<F>,
    index: usize,
) -> Result<(F, F), LikelihoodError> {
    match *obs {
        UncertainObservation::Gaussian { mean, sigma } => Ok((mean, sigma)),
        ref other => Err(LikelihoodError::KindMismatch {
            expected: "gaussian",
            found: other.kind_name(),
            index,
        }),
    }
}

fn require_uniform<F: Scalar>(
    obs: &UncertainObservation<F>,
    index: usize,
) -> Result<(F, F), LikelihoodError> {
    match *obs {
        UncertainObservation::Uniform { low, high } => Ok((low, high)),
        ref other => Err(LikelihoodError::KindMismatch {
            expected: "uniform",
            found: other.kind_name(),
            index,
        }),
    }
}

fn require_certain<F: Scalar>(
    obs: &UncertainObservation<F>,
    index: usize,
) -> Result<F, LikelihoodError> {
    match *obs {
        UncertainObservation::Certain { value } => Ok(value),
        ref other => Err(LikelihoodError::KindMismatch {
            expected: "certain",
            found: other.kind_name(),
            index,
        }),
    }
}

/// Log of the Gaussian density product over all points (diagonal covariance).
pub fn classic_gaussian_ln<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Result<F, LikelihoodError> {
    let mut total = F::zero();
    for (j, (&x, obs)) in data.inputs().iter().zip(data.observations()).enumerate() {
        let (mean, sigma) = require_gaussian(obs, j)?;
        let yhat = model.evaluate(x, params)?;
        total += ln_normal_pdf(yhat, mean, sigma);
    }
    Ok(total)
}

/// Gaussian density product in value space.
pub fn classic_gaussian<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Result<F, LikelihoodError> {
    classic_gaussian_ln(model, params, data).map(F::exp)
}

/// Log of the uniform indicator product: `-inf` as soon as one model output
/// leaves its interval, otherwise `sum -ln(high - low)`.
pub fn classic_uniform_ln<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Result<F, LikelihoodError> {
    let mut total = F::zero();
    for (j, (&x, obs)) in data.inputs().iter().zip(data.observations()).enumerate() {
        let (low, high) = require_uniform(obs, j)?;
        let yhat = model.evaluate(x, params)?;
        // fail closed on non-finite outputs; a bare exclusion check would
        // let NaN slip through as "inside"
        let inside = yhat >= low && yhat <= high;
        if !inside {
            return Ok(F::neg_infinity());
        }
        total -= (high - low).ln();
    }
    Ok(total)
}

/// Uniform indicator product in value space.
pub fn classic_uniform<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Result<F, LikelihoodError> {
    classic_uniform_ln(model, params, data).map(F::exp)
}

/// Certain-data match flag: true iff every model output equals its observed
/// value to within [`CERTAIN_MATCH_RTOL`] relative.
///
/// The delta-function likelihood is represented as this flag rather than an
/// infinite density so evidence arithmetic stays finite; a generic parametric
/// model on generic data never matches.
pub fn classic_certain_match<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
) -> Result<bool, LikelihoodError> {
    let rtol: F = cast(CERTAIN_MATCH_RTOL);
    for (j, (&x, obs)) in data.inputs().iter().zip(data.observations()).enumerate() {
        let value = require_certain(obs, j)?;
        let yhat = model.evaluate(x, params)?;
        let scale = yhat.abs().max(value.abs());
        let within = yhat.is_finite() && (yhat - value).abs() <= rtol * scale;
        if !within {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Log agreement probability for Gaussian data under the epsilon Boolean:
/// `sum ln[ Phi((yhat + eps - mean)/sigma) - Phi((yhat - eps - mean)/sigma) ]`.
pub fn bvm_gaussian_eps_ln<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    tolerance: &Tolerance<F>,
) -> Result<F, LikelihoodError> {
    tolerance
        .validate(data.len())
        .map_err(LikelihoodError::Agreement)?;
    let mut total = F::zero();
    for (j, (&x, obs)) in data.inputs().iter().zip(data.observations()).enumerate() {
        let (mean, sigma) = require_gaussian(obs, j)?;
        let yhat = model.evaluate(x, params)?;
        let eps = tolerance.at(j);
        let z_lo = (yhat - eps - mean) / sigma;
        let z_hi = (yhat + eps - mean) / sigma;
        total += ln_normal_interval_prob(z_lo, z_hi);
        if total == F::neg_infinity() {
            return Ok(total);
        }
    }
    Ok(total)
}

/// Value-space agreement probability for Gaussian data.
pub fn bvm_gaussian_eps<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    tolerance: &Tolerance<F>,
) -> Result<F, LikelihoodError> {
    bvm_gaussian_eps_ln(model, params, data, tolerance).map(F::exp)
}

/// Log agreement probability for uniform data under the epsilon Boolean:
/// per point `(u - l)/(high - low)` where `[l, u]` is the intersection of the
/// tolerance band `[yhat - eps, yhat + eps]` with the data interval.
pub fn bvm_uniform_eps_ln<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    tolerance: &Tolerance<F>,
) -> Result<F, LikelihoodError> {
    tolerance
        .validate(data.len())
        .map_err(LikelihoodError::Agreement)?;
    let mut total = F::zero();
    for (j, (&x, obs)) in data.inputs().iter().zip(data.observations()).enumerate() {
        let (low, high) = require_uniform(obs, j)?;
        let yhat = model.evaluate(x, params)?;
        let eps = tolerance.at(j);
        if !yhat.is_finite() {
            return Ok(F::neg_infinity());
        }
        let l = (yhat - eps).max(low);
        let u = (yhat + eps).min(high);
        if u <= l {
            return Ok(F::neg_infinity());
        }
        total += ((u - l) / (high - low)).ln();
    }
    Ok(total)
}

/// Value-space agreement probability for uniform data.
pub fn bvm_uniform_eps<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    tolerance: &Tolerance<F>,
) -> Result<F, LikelihoodError> {
    bvm_uniform_eps_ln(model, params, data, tolerance).map(F::exp)
}

/// Indicator likelihood for certain data: the agreement Boolean evaluated
/// directly on (model outputs, observed values).
pub fn bvm_certain_eps<F: Scalar>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    spec: &AgreementSpec<F>,
    half_width: Option<F>,
) -> Result<bool, LikelihoodError> {
    let mut observed = Vec::with_capacity(data.len());
    for (j, obs) in data.observations().iter().enumerate() {
        observed.push(require_certain(obs, j)?);
    }
    let predicted = model.evaluate_all(data.inputs(), params)?;
    spec.holds(&predicted, &observed, half_width)
        .map_err(LikelihoodError::Agreement)
}

/// Monte Carlo agreement probability for an arbitrary Boolean on data of any
/// (possibly mixed) uncertainty kind: the fraction of `replications` redrawn
/// data sets on which the Boolean holds. Deterministic given the RNG state.
pub fn bvm_monte_carlo<F: Scalar, R: Rng + ?Sized>(
    model: &dyn ParametricModel<F>,
    params: &[F],
    data: &DataSet<F>,
    spec: &AgreementSpec<F>,
    half_width: Option<F>,
    replications: usize,
    rng: &mut R,
) -> Result<F, LikelihoodError> {
    if replications == 0 {
        return Err(LikelihoodError::ZeroReplications);
    }
    let predicted = model.evaluate_all(data.inputs(), params)?;
    let mut hits = 0usize;
    let mut drawn = vec![F::zero(); data.len()];
    for _ in 0..replications {
        for (slot, obs) in drawn.iter_mut().zip(data.observations()) {
            *slot = obs.sample(rng);
        }
        if spec
            .holds(&predicted, &drawn, half_width)
            .map_err(LikelihoodError::Agreement)?
        {
            hits += 1;
        }
    }
    Ok(cast::<F>(hits as f64) / cast(replications as f64))
}

/// A likelihood kernel selection, as configured for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum LikelihoodKernel<F: Scalar> {
    /// Constant likelihood 1 (debugging aid: the posterior equals the prior).
    Flat,
    ClassicGaussian,
    ClassicUniform,
    ClassicCertain,
    BvmGaussianEps {
        tolerance: Tolerance<F>,
    },
    BvmUniformEps {
        tolerance: Tolerance<F>,
    },
    BvmCertainEps {
        agreement: AgreementSpec<F>,
    },
    BvmMonteCarlo {
        agreement: AgreementSpec<F>,
        replications: usize,
    },
}

impl<F: Scalar> LikelihoodKernel<F> {
    /// Epsilon-Boolean kernel over certain data with one shared tolerance.
    pub fn certain_eps(eps: F) -> Self {
        LikelihoodKernel::BvmCertainEps {
            agreement: AgreementSpec::epsilon(eps),
        }
    }

    /// True when the sampler state must carry the latent half-width slot.
    pub fn requires_latent(&self) -> bool {
        match self {
            LikelihoodKernel::BvmCertainEps { agreement }
            | LikelihoodKernel::BvmMonteCarlo { agreement, .. } => {
                agreement.uses_latent_half_width()
            }
            _ => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LikelihoodKernel::Flat => "flat",
            LikelihoodKernel::ClassicGaussian => "classic_gaussian",
            LikelihoodKernel::ClassicUniform => "classic_uniform",
            LikelihoodKernel::ClassicCertain => "classic_certain",
            LikelihoodKernel::BvmGaussianEps { .. } => "bvm_gaussian_eps",
            LikelihoodKernel::BvmUniformEps { .. } => "bvm_uniform_eps",
            LikelihoodKernel::BvmCertainEps { .. } => "bvm_certain_eps",
            LikelihoodKernel::BvmMonteCarlo { .. } => "bvm_monte_carlo",
        }
    }

    /// The agreement spec driving this kernel, when there is one.
    pub fn agreement(&self) -> Option<&AgreementSpec<F>> {
        match self {
            LikelihoodKernel::BvmCertainEps { agreement }
            | LikelihoodKernel::BvmMonteCarlo { agreement, .. } => Some(agreement),
            _ => None,
        }
    }

    /// Tolerance comparable across kernels for the apples-to-apples guard in
    /// model selection: the epsilon tolerance or the full agreement spec.
    pub fn agreement_signature(&self) -> String {
        match self {
            LikelihoodKernel::BvmGaussianEps { tolerance }
            | LikelihoodKernel::BvmUniformEps { tolerance } => format!("eps:{tolerance:?}"),
            LikelihoodKernel::BvmCertainEps { agreement } => format!("bool:{agreement:?}"),
            LikelihoodKernel::BvmMonteCarlo { agreement, .. } => format!("bool:{agreement:?}"),
            other => other.kind_name().to_string(),
        }
    }

    /// Log likelihood of the given model parameters (plus optional latent
    /// half-width) against the dataset. Exact zeros come back as `-inf`.
    pub fn ln_likelihood<R: Rng + ?Sized>(
        &self,
        model: &dyn ParametricModel<F>,
        params: &[F],
        latent: Option<F>,
        data: &DataSet<F>,
        rng: &mut R,
    ) -> Result<F, LikelihoodError> {
        if self.requires_latent() && latent.is_none() {
            return Err(LikelihoodError::MissingLatent);
        }
        let latent = if self.requires_latent() { latent } else { None };
        match self {
            LikelihoodKernel::Flat => Ok(F::zero()),
            LikelihoodKernel::ClassicGaussian => classic_gaussian_ln(model, params, data),
            LikelihoodKernel::ClassicUniform => classic_uniform_ln(model, params, data),
            LikelihoodKernel::ClassicCertain => {
                // Indicator semantics: ln 1 on a match, -inf otherwise.
                Ok(if classic_certain_match(model, params, data)? {
                    F::zero()
                } else {
                    F::neg_infinity()
                })
            }
            LikelihoodKernel::BvmGaussianEps { tolerance } => {
                bvm_gaussian_eps_ln(model, params, data, tolerance)
            }
            LikelihoodKernel::BvmUniformEps { tolerance } => {
                bvm_uniform_eps_ln(model, params, data, tolerance)
            }
            LikelihoodKernel::BvmCertainEps { agreement } => Ok(
                if bvm_certain_eps(model, params, data, agreement, latent)? {
                    F::zero()
                } else {
                    F::neg_infinity()
                },
            ),
            LikelihoodKernel::BvmMonteCarlo {
                agreement,
                replications,
            } => {
                let p =
                    bvm_monte_carlo(model, params, data, agreement, latent, *replications, rng)?;
                Ok(p.ln())
            }
        }
    }
}
