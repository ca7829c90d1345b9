//! Parametric model abstraction and the built-in model zoo.
//!
//! A model is a pure deterministic map `(x, params) -> y_hat`. Models are
//! registered under stable names so configs and scenarios can select them;
//! new models are added at compile time by implementing [`ParametricModel`].

use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{cast, Scalar};

pub mod smallwood;

pub use smallwood::{SmallwoodModel, SmallwoodParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model expects {expected} parameters, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation singularity at x = {x}")]
    Singularity { x: f64 },
    #[error("no sign change in bracket [{low}, {high}] after {expansions} expansions")]
    NoRoot {
        low: f64,
        high: f64,
        expansions: usize,
    },
    #[error("{message}")]
    Domain { message: String },
    #[error("model output is not finite at x = {x}")]
    NonFinite { x: f64 },
}

/// A named deterministic parametric model.
///
/// `evaluate` must be pure: identical `(x, params)` give an identical output.
pub trait ParametricModel<F: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    /// Number of parameters.
    fn dim(&self) -> usize;

    /// Parameter names in chain/state order.
    fn param_names(&self) -> Vec<String>;

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError>;

    /// Evaluate over a set of inputs.
    fn evaluate_all(&self, xs: &[F], params: &[F]) -> Result<Vec<F>, ModelError> {
        xs.iter().map(|&x| self.evaluate(x, params)).collect()
    }
}

fn check_dim(expected: usize, params: &[impl Sized]) -> Result<(), ModelError> {
    if params.len() != expected {
        return Err(ModelError::DimensionMismatch {
            expected,
            got: params.len(),
        });
    }
    Ok(())
}

/// Saturating growth model `y = a1 * x / (a2 + x)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonodModel;

/// `y = a1 * x / (a2 + x)`; errors when `a2 + x == 0`.
pub fn evaluate_monod<F: Scalar>(alpha1: F, alpha2: F, x: F) -> Result<F, ModelError> {
    let denom = alpha2 + x;
    if denom == F::zero() {
        return Err(ModelError::Singularity {
            x: x.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(alpha1 * x / denom)
}

impl<F: Scalar> ParametricModel<F> for MonodModel {
    fn name(&self) -> &str {
        "monod"
    }

    fn dim(&self) -> usize {
        2
    }

    fn param_names(&self) -> Vec<String> {
        vec!["alpha1".into(), "alpha2".into()]
    }

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError> {
        check_dim(2, params)?;
        evaluate_monod(params[0], params[1], x)
    }
}

/// Six-parameter oscillatory test model
/// `y = a1 + a2 * x * exp(-a3 * cos(a4 * x)) + a5 * sin(a6 * x)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyModel;

pub fn evaluate_toy<F: Scalar>(params: &[F], x: F) -> Result<F, ModelError> {
    check_dim(6, params)?;
    let (a1, a2, a3, a4, a5, a6) = (
        params[0], params[1], params[2], params[3], params[4], params[5],
    );
    Ok(a1 + a2 * x * (-a3 * (a4 * x).cos()).exp() + a5 * (a6 * x).sin())
}

impl<F: Scalar> ParametricModel<F> for ToyModel {
    fn name(&self) -> &str {
        "toy6"
    }

    fn dim(&self) -> usize {
        6
    }

    fn param_names(&self) -> Vec<String> {
        (1..=6).map(|i| format!("alpha{i}")).collect()
    }

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError> {
        evaluate_toy(params, x)
    }
}

/// Straight line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearModel;

impl<F: Scalar> ParametricModel<F> for LinearModel {
    fn name(&self) -> &str {
        "linear2"
    }

    fn dim(&self) -> usize {
        2
    }

    fn param_names(&self) -> Vec<String> {
        vec!["slope".into(), "intercept".into()]
    }

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError> {
        check_dim(2, params)?;
        Ok(params[0] * x + params[1])
    }
}

/// Proportional model `y = slope * x` (one parameter).
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaleModel;

impl<F: Scalar> ParametricModel<F> for ScaleModel {
    fn name(&self) -> &str {
        "scale1"
    }

    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["slope".into()]
    }

    fn evaluate(&self, x: F, params: &[F]) -> Result<F, ModelError> {
        check_dim(1, params)?;
        Ok(params[0] * x)
    }
}

/// Constant model `y = level` (one parameter).
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantModel;

impl<F: Scalar> ParametricModel<F> for ConstantModel {
    fn name(&self) -> &str {
        "constant1"
    }

    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["level".into()]
    }

    fn evaluate(&self, _x: F, params: &[F]) -> Result<F, ModelError> {
        check_dim(1, params)?;
        Ok(params[0])
    }
}

/// Names of all built-in models.
pub const MODEL_NAMES: &[&str] = &[
    "monod",
    "toy6",
    "smallwood",
    "linear2",
    "scale1",
    "constant1",
];

/// Look up a built-in model by its registered name.
pub fn model_by_name<F: Scalar>(name: &str) -> Option<Arc<dyn ParametricModel<F>>> {
    match name {
        "monod" => Some(Arc::new(MonodModel)),
        "toy6" => Some(Arc::new(ToyModel)),
        "smallwood" => Some(Arc::new(SmallwoodModel)),
        "linear2" => Some(Arc::new(LinearModel)),
        "scale1" => Some(Arc::new(ScaleModel)),
        "constant1" => Some(Arc::new(ConstantModel)),
        _ => None,
    }
}

/// The smooth part of the toy data generator plus its documented noise model:
/// `y = 1 + x exp(-cos(10x)) + sin(10x) + noise`, where the aleatoric noise
/// is N(0, 0.4^2) for x <= 1.5 and N(0, 0.6^2) above.
pub fn toy_generator_mean<F: Scalar>(x: F) -> F {
    let ten: F = cast(10.0);
    F::one() + x * (-(ten * x).cos()).exp() + (ten * x).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monod_zero_input_and_saturation() {
        assert_eq!(evaluate_monod(0.14542f64, 49.053, 0.0).unwrap(), 0.0);
        assert_eq!(evaluate_monod(1.0f64, 0.0, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn monod_matches_direct_arithmetic() {
        // independent evaluation: 0.14542 * 375 / (49.053 + 375)
        let expected = 0.14542 * 375.0 / 424.053;
        let got = evaluate_monod(0.14542f64, 49.053, 375.0).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.12860).abs() < 1e-5);
    }

    #[test]
    fn monod_singularity_is_an_error() {
        let err = evaluate_monod(1.0f64, -7.0, 7.0).unwrap_err();
        assert!(matches!(err, ModelError::Singularity { .. }));
    }

    #[test]
    fn monod_is_monotone_in_x_for_positive_params() {
        let model = MonodModel;
        let params = [0.2f64, 30.0];
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let x = i as f64 * 2.5;
            let y = model.evaluate(x, &params).unwrap();
            assert!(y >= prev);
            prev = y;
        }
    }

    #[test]
    fn toy_limit_cases() {
        // all amplitude terms vanish
        let zeroed = [0.0f64, 0.0, 0.0, 9.0, 0.0, 9.0];
        for &x in &[0.0, 0.7, 2.3] {
            assert_eq!(evaluate_toy(&zeroed, x).unwrap(), 0.0);
        }
        // constant term only
        assert_eq!(
            evaluate_toy(&[1.0f64, 0.0, 0.0, 0.0, 0.0, 0.0], 3.0).unwrap(),
            1.0
        );
        // x = 0 kills the second term and sin(0) = 0
        assert_eq!(
            evaluate_toy(&[1.0f64, 1.0, 1.0, 10.0, 1.0, 10.0], 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn toy_generator_mean_at_zero_is_one() {
        assert_eq!(toy_generator_mean(0.0f64), 1.0);
    }

    #[test]
    fn evaluators_are_pure_bitwise() {
        let model = ToyModel;
        let params = [0.3f64, -1.2, 0.5, 9.4, 1.1, 8.7];
        for i in 0..50 {
            let x = i as f64 * 0.06;
            let a = model.evaluate(x, &params).unwrap();
            let b = model.evaluate(x, &params).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn registry_resolves_every_listed_name() {
        for name in MODEL_NAMES {
            let model = model_by_name::<f64>(name).unwrap();
            assert_eq!(&model.name(), name);
            assert_eq!(model.param_names().len(), model.dim());
        }
        assert!(model_by_name::<f64>("nope").is_none());
    }

    #[test]
    fn models_work_in_f32_too() {
        let model = model_by_name::<f32>("monod").unwrap();
        let y = model.evaluate(375.0f32, &[0.14542, 49.053]).unwrap();
        assert!((y - 0.1286).abs() < 1e-4);
    }
}
