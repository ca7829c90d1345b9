//! Run configuration: the JSON-facing schema the CLI and scenario exports
//! share, plus validated conversion into the runtime types.
//!
//! All config structs use `deny_unknown_fields`, so a typo in a config file
//! is an error, not a silent default. Polymorphic pieces (dataset source,
//! kernel, agreement, prior components) are flat option-structs with a `kind`
//! or name discriminator; `build` methods enforce that exactly the fields for
//! the selected kind are present. Every real number in a file is 64-bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::{AgreementSpec, Tolerance};
use crate::data::{DataFormat, DataSet};
use crate::likelihood::LikelihoodKernel;
use crate::sampler::{McmcConfig, Prior, PriorComponent};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("dataset source must set exactly one of path, scenario, or inline")]
    AmbiguousDatasetSource,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("unknown kernel {0:?}")]
    UnknownKernel(String),
    #[error("unknown agreement kind {0:?}")]
    UnknownAgreementKind(String),
    #[error("kernel {kernel:?}: {message}")]
    KernelFields { kernel: String, message: String },
    #[error("agreement {kind:?}: {message}")]
    AgreementFields { kind: String, message: String },
    #[error("prior component {index}: {message}")]
    PriorFields { index: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Where the dataset comes from: a file, a named scenario, or inline data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DatasetSourceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// File format; inferred from the extension when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<DataFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inline: Option<DataSet<f64>>,
}

impl DatasetSourceConfig {
    pub fn inline(data: DataSet<f64>) -> Self {
        Self {
            inline: Some(data),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let set = usize::from(self.path.is_some())
            + usize::from(self.scenario.is_some())
            + usize::from(self.inline.is_some());
        if set != 1 {
            return Err(ConfigError::AmbiguousDatasetSource);
        }
        if self.format.is_some() && self.path.is_none() {
            return Err(ConfigError::Invalid(
                "dataset format only applies to path sources".into(),
            ));
        }
        Ok(())
    }
}

/// Agreement Boolean in config form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgreementConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Tolerance<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_epsilon: Option<f64>,
}

impl AgreementConfig {
    pub fn epsilon(eps: f64) -> Self {
        Self {
            kind: "epsilon".into(),
            epsilon: Some(Tolerance::Uniform(eps)),
            gamma: None,
            ell: None,
            mean_epsilon: None,
        }
    }

    pub fn mean_epsilon_coverage(mean_epsilon: f64) -> Self {
        Self {
            kind: "mean_epsilon_coverage".into(),
            epsilon: None,
            gamma: None,
            ell: None,
            mean_epsilon: Some(mean_epsilon),
        }
    }

    fn fields_error(&self, message: &str) -> ConfigError {
        ConfigError::AgreementFields {
            kind: self.kind.clone(),
            message: message.into(),
        }
    }

    pub fn build(&self) -> Result<AgreementSpec<f64>, ConfigError> {
        let forbid = |cond: bool, what: &str| -> Result<(), ConfigError> {
            if cond {
                Err(self.fields_error(&format!("{what} does not apply to this kind")))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "exact" => {
                forbid(self.epsilon.is_some(), "epsilon")?;
                forbid(self.gamma.is_some(), "gamma")?;
                forbid(self.ell.is_some(), "ell")?;
                forbid(self.mean_epsilon.is_some(), "mean_epsilon")?;
                Ok(AgreementSpec::Exact)
            }
            "epsilon" => {
                forbid(self.gamma.is_some(), "gamma")?;
                forbid(self.ell.is_some(), "ell")?;
                forbid(self.mean_epsilon.is_some(), "mean_epsilon")?;
                let epsilon = self
                    .epsilon
                    .clone()
                    .ok_or_else(|| self.fields_error("epsilon is required"))?;
                Ok(AgreementSpec::Epsilon { epsilon })
            }
            "gamma_epsilon_ell" => {
                forbid(self.mean_epsilon.is_some(), "mean_epsilon")?;
                let epsilon = self
                    .epsilon
                    .clone()
                    .ok_or_else(|| self.fields_error("epsilon is required"))?;
                let gamma = self
                    .gamma
                    .ok_or_else(|| self.fields_error("gamma is required"))?;
                let ell = self
                    .ell
                    .ok_or_else(|| self.fields_error("ell is required"))?;
                Ok(AgreementSpec::GammaEpsilonEll {
                    epsilon,
                    gamma,
                    ell,
                })
            }
            "mean_epsilon" => {
                forbid(self.epsilon.is_some(), "epsilon")?;
                forbid(self.gamma.is_some(), "gamma")?;
                forbid(self.ell.is_some(), "ell")?;
                let mean_epsilon = self
                    .mean_epsilon
                    .ok_or_else(|| self.fields_error("mean_epsilon is required"))?;
                Ok(AgreementSpec::MeanEpsilon { mean_epsilon })
            }
            "mean_epsilon_coverage" => {
                forbid(self.epsilon.is_some(), "epsilon")?;
                forbid(self.gamma.is_some(), "gamma")?;
                forbid(self.ell.is_some(), "ell")?;
                let mean_epsilon = self
                    .mean_epsilon
                    .ok_or_else(|| self.fields_error("mean_epsilon is required"))?;
                Ok(AgreementSpec::MeanEpsilonCoverage { mean_epsilon })
            }
            other => Err(ConfigError::UnknownAgreementKind(other.into())),
        }
    }
}

/// Likelihood kernel in config form, e.g.
/// `{"kernel": "bvm_uniform_eps", "epsilon": 0.03}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kernel: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Tolerance<f64>>,
    /// Full agreement spec, for kernels driven by a Boolean. A bare
    /// `epsilon` is shorthand for the epsilon Boolean.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementConfig>,
    /// Monte Carlo replications (bvm_monte_carlo only); default 50.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
}

/// Default Monte Carlo replication count for the sampled-likelihood kernel.
pub const DEFAULT_MC_REPLICATIONS: usize = 50;

impl KernelConfig {
    pub fn plain(kernel: &str) -> Self {
        Self {
            kernel: kernel.into(),
            epsilon: None,
            agreement: None,
            replications: None,
        }
    }

    pub fn with_epsilon(kernel: &str, eps: f64) -> Self {
        Self {
            kernel: kernel.into(),
            epsilon: Some(Tolerance::Uniform(eps)),
            agreement: None,
            replications: None,
        }
    }

    fn fields_error(&self, message: &str) -> ConfigError {
        ConfigError::KernelFields {
            kernel: self.kernel.clone(),
            message: message.into(),
        }
    }

    fn boolean_spec(&self) -> Result<AgreementSpec<f64>, ConfigError> {
        match (&self.agreement, &self.epsilon) {
            (Some(_), Some(_)) => {
                Err(self.fields_error("set either agreement or the epsilon shorthand, not both"))
            }
            (Some(agreement), None) => agreement.build(),
            (None, Some(eps)) => Ok(AgreementSpec::Epsilon {
                epsilon: eps.clone(),
            }),
            (None, None) => Err(self.fields_error("an agreement spec (or epsilon) is required")),
        }
    }

    pub fn build(&self) -> Result<LikelihoodKernel<f64>, ConfigError> {
        let no_extras = |cfg: &Self| -> Result<(), ConfigError> {
            if cfg.epsilon.is_some() || cfg.agreement.is_some() || cfg.replications.is_some() {
                Err(cfg.fields_error("this kernel takes no extra fields"))
            } else {
                Ok(())
            }
        };
        match self.kernel.as_str() {
            "flat" => {
                no_extras(self)?;
                Ok(LikelihoodKernel::Flat)
            }
            "classic_gaussian" => {
                no_extras(self)?;
                Ok(LikelihoodKernel::ClassicGaussian)
            }
            "classic_uniform" => {
                no_extras(self)?;
                Ok(LikelihoodKernel::ClassicUniform)
            }
            "classic_certain" => {
                no_extras(self)?;
                Ok(LikelihoodKernel::ClassicCertain)
            }
            "bvm_gaussian_eps" | "bvm_uniform_eps" => {
                if self.agreement.is_some() || self.replications.is_some() {
                    return Err(self.fields_error("only epsilon applies to this kernel"));
                }
                let tolerance = self
                    .epsilon
                    .clone()
                    .ok_or_else(|| self.fields_error("epsilon is required"))?;
                Ok(if self.kernel == "bvm_gaussian_eps" {
                    LikelihoodKernel::BvmGaussianEps { tolerance }
                } else {
                    LikelihoodKernel::BvmUniformEps { tolerance }
                })
            }
            "bvm_certain_eps" => {
                if self.replications.is_some() {
                    return Err(self.fields_error("replications do not apply to this kernel"));
                }
                Ok(LikelihoodKernel::BvmCertainEps {
                    agreement: self.boolean_spec()?,
                })
            }
            "bvm_monte_carlo" => Ok(LikelihoodKernel::BvmMonteCarlo {
                agreement: self.boolean_spec()?,
                replications: self.replications.unwrap_or(DEFAULT_MC_REPLICATIONS),
            }),
            other => Err(ConfigError::UnknownKernel(other.into())),
        }
    }

    /// Replace the tolerance in place (`--epsilon` CLI override).
    pub fn override_epsilon(&mut self, eps: f64) -> Result<(), ConfigError> {
        if self.epsilon.is_some() {
            self.epsilon = Some(Tolerance::Uniform(eps));
            return Ok(());
        }
        if let Some(agreement) = &mut self.agreement {
            match agreement.kind.as_str() {
                "epsilon" | "gamma_epsilon_ell" => {
                    agreement.epsilon = Some(Tolerance::Uniform(eps));
                    return Ok(());
                }
                "mean_epsilon" | "mean_epsilon_coverage" => {
                    agreement.mean_epsilon = Some(eps);
                    return Ok(());
                }
                _ => {}
            }
        }
        Err(self.fields_error("kernel has no tolerance to override"))
    }
}

/// One prior component in config form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorComponentConfig {
    pub distribution: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
}

impl PriorComponentConfig {
    pub fn gaussian(mean: f64, sd: f64) -> Self {
        Self {
            distribution: "gaussian".into(),
            mean: Some(mean),
            sd: Some(sd),
            low: None,
            high: None,
        }
    }

    pub fn uniform(low: f64, high: f64) -> Self {
        Self {
            distribution: "uniform".into(),
            mean: None,
            sd: None,
            low: Some(low),
            high: Some(high),
        }
    }

    pub fn build(&self, index: usize) -> Result<PriorComponent<f64>, ConfigError> {
        let err = |message: &str| ConfigError::PriorFields {
            index,
            message: message.into(),
        };
        match self.distribution.as_str() {
            "gaussian" => {
                if self.low.is_some() || self.high.is_some() {
                    return Err(err("low/high do not apply to gaussian components"));
                }
                Ok(PriorComponent::Gaussian {
                    mean: self.mean.ok_or_else(|| err("mean is required"))?,
                    sd: self.sd.ok_or_else(|| err("sd is required"))?,
                })
            }
            "uniform" => {
                if self.mean.is_some() || self.sd.is_some() {
                    return Err(err("mean/sd do not apply to uniform components"));
                }
                Ok(PriorComponent::Uniform {
                    low: self.low.ok_or_else(|| err("low is required"))?,
                    high: self.high.ok_or_else(|| err("high is required"))?,
                })
            }
            other => Err(err(&format!("unknown distribution {other:?}"))),
        }
    }
}

/// Chain settings in config form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSettings {
    pub iterations: usize,
    pub burn_in_fraction: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposal_scales: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<f64>>,
}

impl McmcSettings {
    pub fn build(&self) -> McmcConfig<f64> {
        McmcConfig {
            iterations: self.iterations,
            burn_in_fraction: self.burn_in_fraction,
            proposal_scales: self.proposal_scales.clone(),
            initial_state: self.initial_state.clone(),
            seed: self.seed,
        }
    }
}

/// Envelope output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
}

/// A full run description: dataset, model, prior, kernel, chain settings,
/// and output options. This is the schema config files, scenario exports,
/// and manifests all share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dataset: DatasetSourceConfig,
    pub model: String,
    pub prior: Vec<PriorComponentConfig>,
    pub kernel: KernelConfig,
    pub mcmc: McmcSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence_draws: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.dataset.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn build_prior(&self) -> Result<Prior<f64>, ConfigError> {
        let components = self
            .prior
            .iter()
            .enumerate()
            .map(|(i, c)| c.build(i))
            .collect::<Result<Vec<_>, _>>()?;
        Prior::new(components).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_config_json() -> String {
        r#"{
            "dataset": {"inline": {"label": "d", "inputs": [1.0],
                        "observations": [{"kind": "certain", "value": 2.0}]}},
            "model": "linear2",
            "prior": [
                {"distribution": "gaussian", "mean": 0.0, "sd": 1.0},
                {"distribution": "gaussian", "mean": 0.5, "sd": 1.0}
            ],
            "kernel": {"kernel": "bvm_certain_eps", "epsilon": 0.5},
            "mcmc": {"iterations": 100, "burn_in_fraction": 0.1, "seed": 1}
        }"#
        .into()
    }

    #[test]
    fn minimal_config_parses_and_builds() {
        let config = RunConfig::from_json(&minimal_config_json()).unwrap();
        assert_eq!(config.model, "linear2");
        let kernel = config.kernel.build().unwrap();
        assert_eq!(kernel.kind_name(), "bvm_certain_eps");
        let prior = config.build_prior().unwrap();
        assert_eq!(prior.dim(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal_config_json().replace("\"model\"", "\"surprise\": 1, \"model\"");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn dataset_source_must_be_unambiguous() {
        let mut source = DatasetSourceConfig::default();
        assert!(source.validate().is_err());
        source.path = Some("a.csv".into());
        source.scenario = Some("monod".into());
        assert!(source.validate().is_err());
        source.scenario = None;
        assert!(source.validate().is_ok());
    }

    #[test]
    fn kernel_field_exactness() {
        // epsilon on a classic kernel is an error
        let bad = KernelConfig {
            kernel: "classic_gaussian".into(),
            epsilon: Some(Tolerance::Uniform(0.1)),
            agreement: None,
            replications: None,
        };
        assert!(bad.build().is_err());
        // monte carlo defaults its replication count
        let mc = KernelConfig {
            kernel: "bvm_monte_carlo".into(),
            epsilon: Some(Tolerance::Uniform(0.1)),
            agreement: None,
            replications: None,
        };
        match mc.build().unwrap() {
            LikelihoodKernel::BvmMonteCarlo { replications, .. } => {
                assert_eq!(replications, DEFAULT_MC_REPLICATIONS);
            }
            other => panic!("unexpected kernel {other:?}"),
        }
        assert!(KernelConfig::plain("nope").build().is_err());
    }

    #[test]
    fn agreement_kinds_require_their_exact_fields() {
        let mut cfg = AgreementConfig::epsilon(0.1);
        cfg.gamma = Some(90.0);
        assert!(cfg.build().is_err());

        let compound = AgreementConfig::mean_epsilon_coverage(0.7);
        assert_eq!(
            compound.build().unwrap(),
            AgreementSpec::MeanEpsilonCoverage { mean_epsilon: 0.7 }
        );
    }

    #[test]
    fn epsilon_override_reaches_nested_agreement() {
        let mut kernel = KernelConfig {
            kernel: "bvm_monte_carlo".into(),
            epsilon: None,
            agreement: Some(AgreementConfig::mean_epsilon_coverage(0.7)),
            replications: Some(50),
        };
        kernel.override_epsilon(0.9).unwrap();
        assert_eq!(kernel.agreement.as_ref().unwrap().mean_epsilon, Some(0.9));

        let mut flat = KernelConfig::plain("flat");
        assert!(flat.override_epsilon(0.1).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = RunConfig::from_json(&minimal_config_json()).unwrap();
        let text = config.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(config, back);
        assert_eq!(text, back.to_json());
    }
}
