//! Boolean definitions of model-data agreement.
//!
//! An agreement spec decides, for paired vectors of model outputs and data
//! values, whether the model "agrees" with the data. The supported family:
//!
//! * epsilon: every residual `|y_j - yhat_j|` within a tolerance (scalar or
//!   per point);
//! * gamma/epsilon/ell: every residual within `ell * eps_j`, and at least
//!   gamma percent of residuals within `eps_j`;
//! * mean-epsilon: mean absolute residual within a threshold;
//! * mean-epsilon with coverage: the mean-absolute clause plus a requirement
//!   that between 91% and 99% of data values fall inside the model's
//!   half-width-`c` band `[yhat_j - c, yhat_j + c]`;
//! * exact: bitwise equality (the classical notion).
//!
//! The coverage window is fixed at [0.91, 0.99]; the upper bound exists so a
//! band wide enough to swallow 100% of the data does not count as agreeing.
//! The half width `c` is not a constant: it rides along as a latent
//! parameter of the sampler state, so the coverage clause is well-defined for
//! a deterministic model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cast, Scalar};

/// Inclusive coverage window for the compound Boolean.
pub const COVERAGE_LOW: f64 = 0.91;
/// Inclusive upper coverage bound (blocks the all-points-covered trivial pass).
pub const COVERAGE_HIGH: f64 = 0.99;

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("predicted and observed vectors differ in length ({predicted} vs {observed})")]
    LengthMismatch { predicted: usize, observed: usize },
    #[error("per-point tolerance has {got} entries but the data has {expected}")]
    ToleranceLength { expected: usize, got: usize },
    #[error("negative tolerance {value}")]
    NegativeTolerance { value: f64 },
    #[error("gamma must be a percentage in [0, 100], got {value}")]
    GammaRange { value: f64 },
    #[error("ell must be >= 1, got {value}")]
    EllRange { value: f64 },
    #[error("the coverage clause needs the latent interval half-width c")]
    MissingHalfWidth,
    #[error("a latent half-width was supplied but this agreement kind does not use one")]
    UnexpectedHalfWidth,
}

/// Scalar-or-per-point tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "")]
pub enum Tolerance<F: Scalar> {
    Uniform(F),
    PerPoint(Vec<F>),
}

impl<F: Scalar> Tolerance<F> {
    pub fn validate(&self, n: usize) -> Result<(), AgreementError> {
        match self {
            Tolerance::Uniform(eps) => {
                if *eps < F::zero() {
                    return Err(AgreementError::NegativeTolerance {
                        value: eps.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            Tolerance::PerPoint(eps) => {
                if eps.len() != n {
                    return Err(AgreementError::ToleranceLength {
                        expected: n,
                        got: eps.len(),
                    });
                }
                for &e in eps {
                    if e < F::zero() {
                        return Err(AgreementError::NegativeTolerance {
                            value: e.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, j: usize) -> F {
        match self {
            Tolerance::Uniform(eps) => *eps,
            Tolerance::PerPoint(eps) => eps[j],
        }
    }

    /// Uniformly scaled copy (used by monotonicity checks).
    pub fn scaled(&self, factor: F) -> Self {
        match self {
            Tolerance::Uniform(eps) => Tolerance::Uniform(*eps * factor),
            Tolerance::PerPoint(eps) => {
                Tolerance::PerPoint(eps.iter().map(|&e| e * factor).collect())
            }
        }
    }
}

/// A Boolean agreement definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum AgreementSpec<F: Scalar> {
    /// Bitwise equality of every pair.
    Exact,
    /// Every residual within the tolerance.
    Epsilon { epsilon: Tolerance<F> },
    /// Residuals within `ell * eps` everywhere, and at least `gamma`% within `eps`.
    GammaEpsilonEll {
        epsilon: Tolerance<F>,
        gamma: F,
        ell: F,
    },
    /// Mean absolute residual within the threshold.
    MeanEpsilon { mean_epsilon: F },
    /// Mean-absolute clause plus 91-99% coverage of the latent-half-width band.
    MeanEpsilonCoverage { mean_epsilon: F },
}

impl<F: Scalar> AgreementSpec<F> {
    /// Epsilon spec with one shared tolerance.
    pub fn epsilon(eps: F) -> Self {
        AgreementSpec::Epsilon {
            epsilon: Tolerance::Uniform(eps),
        }
    }

    /// True when evaluation requires the latent interval half-width.
    pub fn uses_latent_half_width(&self) -> bool {
        matches!(self, AgreementSpec::MeanEpsilonCoverage { .. })
    }

    pub fn validate(&self, n: usize) -> Result<(), AgreementError> {
        match self {
            AgreementSpec::Exact => Ok(()),
            AgreementSpec::Epsilon { epsilon } => epsilon.validate(n),
            AgreementSpec::GammaEpsilonEll {
                epsilon,
                gamma,
                ell,
            } => {
                epsilon.validate(n)?;
                if *gamma < F::zero() || *gamma > cast(100.0) {
                    return Err(AgreementError::GammaRange {
                        value: gamma.to_f64().unwrap_or(f64::NAN),
                    });
                }
                if *ell < F::one() {
                    return Err(AgreementError::EllRange {
                        value: ell.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(())
            }
            AgreementSpec::MeanEpsilon { mean_epsilon }
            | AgreementSpec::MeanEpsilonCoverage { mean_epsilon } => {
                if *mean_epsilon < F::zero() {
                    return Err(AgreementError::NegativeTolerance {
                        value: mean_epsilon.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(())
            }
        }
    }

    /// Evaluate the Boolean on paired vectors.
    ///
    /// `half_width` must be supplied exactly when
    /// [`uses_latent_half_width`](Self::uses_latent_half_width) is true.
    pub fn holds(
        &self,
        predicted: &[F],
        observed: &[F],
        half_width: Option<F>,
    ) -> Result<bool, AgreementError> {
        if predicted.len() != observed.len() {
            return Err(AgreementError::LengthMismatch {
                predicted: predicted.len(),
                observed: observed.len(),
            });
        }
        if half_width.is_some() && !self.uses_latent_half_width() {
            return Err(AgreementError::UnexpectedHalfWidth);
        }
        let n = predicted.len();
        self.validate(n)?;
        let n_f: F = cast(n as f64);

        match self {
            AgreementSpec::Exact => Ok(predicted.iter().zip(observed).all(|(yh, y)| yh == y)),
            AgreementSpec::Epsilon { epsilon } => Ok(predicted
                .iter()
                .zip(observed)
                .enumerate()
                .all(|(j, (&yh, &y))| (y - yh).abs() <= epsilon.at(j))),
            AgreementSpec::GammaEpsilonEll {
                epsilon,
                gamma,
                ell,
            } => {
                let mut within_strict = 0usize;
                for (j, (&yh, &y)) in predicted.iter().zip(observed).enumerate() {
                    let r = (y - yh).abs();
                    if r > *ell * epsilon.at(j) {
                        return Ok(false);
                    }
                    if r <= epsilon.at(j) {
                        within_strict += 1;
                    }
                }
                let fraction: F = cast::<F>(within_strict as f64) / n_f;
                Ok(fraction * cast(100.0) >= *gamma)
            }
            AgreementSpec::MeanEpsilon { mean_epsilon } => {
                Ok(mean_abs_residual(predicted, observed) <= *mean_epsilon)
            }
            AgreementSpec::MeanEpsilonCoverage { mean_epsilon } => {
                let c = half_width.ok_or(AgreementError::MissingHalfWidth)?;
                if mean_abs_residual(predicted, observed) > *mean_epsilon {
                    return Ok(false);
                }
                let covered = predicted
                    .iter()
                    .zip(observed)
                    .filter(|(&yh, &y)| y >= yh - c && y <= yh + c)
                    .count();
                let fraction: F = cast::<F>(covered as f64) / n_f;
                Ok(fraction >= cast(COVERAGE_LOW) && fraction <= cast(COVERAGE_HIGH))
            }
        }
    }
}

fn mean_abs_residual<F: Scalar>(predicted: &[F], observed: &[F]) -> F {
    let total: F = predicted
        .iter()
        .zip(observed)
        .map(|(&yh, &y)| (y - yh).abs())
        .sum();
    total / cast(predicted.len() as f64)
}
