//! Datasets of uncertain observations.
//!
//! Each data point is a full probability statement about the measured value:
//! a completely certain number, a bounded uniform interval, or a Gaussian
//! with known spread. Datasets pair those observations with their inputs and
//! are immutable after construction, so they can be shared freely across
//! threads; samplers take an externally owned RNG.
//!
//! Mixing uncertainty kinds inside one dataset is permitted (the likelihood
//! kernels that support it factorize per point); homogeneous-kind kernels
//! reject mixed data explicitly.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::scalar::{cast, Scalar};
use crate::stats::ln_normal_pdf;

/// Errors from dataset construction, validation, and file ingestion.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("row {row}: uniform interval requires low < high (got low={low}, high={high})")]
    EmptyInterval { row: usize, low: f64, high: f64 },
    #[error("row {row}: gaussian sigma must be > 0 (got {sigma})")]
    NonPositiveSigma { row: usize, sigma: f64 },
    #[error("dataset must contain at least one point")]
    Empty,
    #[error("inputs and observations differ in length ({inputs} vs {observations})")]
    LengthMismatch { inputs: usize, observations: usize },
    #[error("density of a certain (point-mass) observation is undefined")]
    PointMassDensity,
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error in {path}: {message}")]
    Json { path: String, message: String },
}

/// One observed data point, described by its uncertainty class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", bound = "")]
pub enum UncertainObservation<F: Scalar> {
    /// A completely certain (deterministic) value.
    Certain { value: F },
    /// Uniform on [low, high], low < high strictly.
    Uniform { low: F, high: F },
    /// Gaussian with the given mean and standard deviation (sigma > 0).
    Gaussian { mean: F, sigma: F },
}

impl<F: Scalar> UncertainObservation<F> {
    pub fn certain(value: F) -> Self {
        Self::Certain { value }
    }

    pub fn uniform(low: F, high: F) -> Result<Self, DataError> {
        let obs = Self::Uniform { low, high };
        obs.validate(0)?;
        Ok(obs)
    }

    pub fn gaussian(mean: F, sigma: F) -> Result<Self, DataError> {
        let obs = Self::Gaussian { mean, sigma };
        obs.validate(0)?;
        Ok(obs)
    }

    /// Check the per-kind invariants; `row` is only used in error messages.
    pub fn validate(&self, row: usize) -> Result<(), DataError> {
        match *self {
            Self::Certain { value } => {
                if !value.is_finite() {
                    return Err(DataError::Parse {
                        row,
                        message: "certain value must be finite".into(),
                    });
                }
            }
            Self::Uniform { low, high } => {
                if !low.is_finite() || !high.is_finite() || low >= high {
                    return Err(DataError::EmptyInterval {
                        row,
                        low: low.to_f64().unwrap_or(f64::NAN),
                        high: high.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            Self::Gaussian { mean, sigma } => {
                if !mean.is_finite() || !(sigma.is_finite() && sigma > F::zero()) {
                    return Err(DataError::NonPositiveSigma {
                        row,
                        sigma: sigma.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }

    /// Probability density at `y`.
    ///
    /// Certain observations are point masses and carry no density; code that
    /// needs their likelihood contribution goes through the indicator paths
    /// instead.
    pub fn density(&self, y: F) -> Result<F, DataError> {
        match *self {
            Self::Certain { .. } => Err(DataError::PointMassDensity),
            Self::Uniform { low, high } => {
                if y >= low && y <= high {
                    Ok(F::one() / (high - low))
                } else {
                    Ok(F::zero())
                }
            }
            Self::Gaussian { mean, sigma } => Ok(ln_normal_pdf(y, mean, sigma).exp()),
        }
    }

    /// Draw one value from the observation's distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        match *self {
            Self::Certain { value } => value,
            Self::Uniform { low, high } => low + (high - low) * F::unit_uniform(rng),
            Self::Gaussian { mean, sigma } => mean + sigma * F::standard_normal(rng),
        }
    }

    /// Central value: the certain value, interval midpoint, or Gaussian mean.
    pub fn center(&self) -> F {
        match *self {
            Self::Certain { value } => value,
            Self::Uniform { low, high } => (low + high) / cast(2.0),
            Self::Gaussian { mean, .. } => mean,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Certain { .. } => "certain",
            Self::Uniform { .. } => "uniform",
            Self::Gaussian { .. } => "gaussian",
        }
    }
}

/// File format for dataset ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

/// An immutable set of inputs paired with uncertain observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DataSet<F: Scalar> {
    label: String,
    inputs: Vec<F>,
    observations: Vec<UncertainObservation<F>>,
}

impl<F: Scalar> DataSet<F> {
    pub fn new(
        label: impl Into<String>,
        inputs: Vec<F>,
        observations: Vec<UncertainObservation<F>>,
    ) -> Result<Self, DataError> {
        let dataset = Self {
            label: label.into(),
            inputs,
            observations,
        };
        dataset.revalidate()?;
        Ok(dataset)
    }

    /// Re-run every construction invariant. Deserialization bypasses the
    /// constructors, so anything ingesting untrusted data calls this.
    pub fn revalidate(&self) -> Result<(), DataError> {
        if self.inputs.len() != self.observations.len() {
            return Err(DataError::LengthMismatch {
                inputs: self.inputs.len(),
                observations: self.observations.len(),
            });
        }
        if self.inputs.is_empty() {
            return Err(DataError::Empty);
        }
        for (i, (&x, obs)) in self.inputs.iter().zip(&self.observations).enumerate() {
            if !x.is_finite() {
                return Err(DataError::Parse {
                    row: i + 1,
                    message: format!("input x must be finite, got {x}"),
                });
            }
            obs.validate(i + 1)?;
        }
        Ok(())
    }

    /// Convenience constructor for completely certain observations.
    pub fn certain(
        label: impl Into<String>,
        inputs: Vec<F>,
        values: Vec<F>,
    ) -> Result<Self, DataError> {
        let obs = values
            .into_iter()
            .map(UncertainObservation::certain)
            .collect();
        Self::new(label, inputs, obs)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[F] {
        &self.inputs
    }

    pub fn observations(&self) -> &[UncertainObservation<F>] {
        &self.observations
    }

    /// Central values of all observations, in input order.
    pub fn centers(&self) -> Vec<F> {
        self.observations.iter().map(|o| o.center()).collect()
    }

    /// True when every observation has the same uncertainty kind.
    pub fn is_homogeneous(&self) -> bool {
        let first = self.observations[0].kind_name();
        self.observations.iter().all(|o| o.kind_name() == first)
    }

    /// Load a dataset from a file in the given format.
    pub fn load(path: impl AsRef<Path>, format: DataFormat) -> Result<Self, DataError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        match format {
            DataFormat::Csv => {
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "dataset".into());
                Self::parse_csv(&label, &text)
            }
            DataFormat::Json => Self::parse_json(&text).map_err(|message| DataError::Json {
                path: path.display().to_string(),
                message,
            }),
        }
    }

    /// Parse the flat CSV schema `x,p1[,p2],kind`.
    ///
    /// `certain` rows may omit the p2 column entirely or leave it empty;
    /// `uniform` rows carry (low, high) and `gaussian` rows (mean, sigma).
    /// Blank lines are skipped. Row numbers in errors are 1-based.
    pub fn parse_csv(label: &str, text: &str) -> Result<Self, DataError> {
        let mut inputs = Vec::new();
        let mut observations = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let row = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_field = |name: &str, raw: &str| -> Result<F, DataError> {
                raw.parse::<f64>()
                    .map(cast::<F>)
                    .map_err(|_| DataError::Parse {
                        row,
                        message: format!("cannot parse {name} value {raw:?} as a number"),
                    })
            };
            let (kind, p1, p2) = match fields.len() {
                3 => (fields[2], fields[1], None),
                4 => (fields[3], fields[1], Some(fields[2])),
                n => {
                    return Err(DataError::Parse {
                        row,
                        message: format!("expected 3 or 4 comma-separated fields, found {n}"),
                    })
                }
            };
            let x = parse_field("x", fields[0])?;
            let obs = match kind {
                "certain" => {
                    if let Some(p2) = p2 {
                        if !p2.is_empty() {
                            return Err(DataError::Parse {
                                row,
                                message: format!(
                                    "certain rows take a single value, found extra field {p2:?}"
                                ),
                            });
                        }
                    }
                    UncertainObservation::Certain {
                        value: parse_field("value", p1)?,
                    }
                }
                "uniform" => {
                    let p2 = p2
                        .filter(|s| !s.is_empty())
                        .ok_or_else(|| DataError::Parse {
                            row,
                            message: "uniform rows need both low and high".into(),
                        })?;
                    UncertainObservation::Uniform {
                        low: parse_field("low", p1)?,
                        high: parse_field("high", p2)?,
                    }
                }
                "gaussian" => {
                    let p2 = p2
                        .filter(|s| !s.is_empty())
                        .ok_or_else(|| DataError::Parse {
                            row,
                            message: "gaussian rows need both mean and sigma".into(),
                        })?;
                    UncertainObservation::Gaussian {
                        mean: parse_field("mean", p1)?,
                        sigma: parse_field("sigma", p2)?,
                    }
                }
                other => {
                    return Err(DataError::Parse {
                        row,
                        message: format!(
                            "unknown kind {other:?} (expected certain, uniform, or gaussian)"
                        ),
                    })
                }
            };
            obs.validate(row)?;
            inputs.push(x);
            observations.push(obs);
        }
        Self::new(label, inputs, observations)
    }

    fn parse_json(text: &str) -> Result<Self, String> {
        let parsed: DataSet<F> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        parsed.revalidate().map_err(|e| e.to_string())?;
        Ok(parsed)
    }

    /// Serialize to the flat CSV schema. Values print in shortest
    /// round-trip form, so load -> serialize -> load is bit-exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (x, obs) in self.inputs.iter().zip(&self.observations) {
            match obs {
                UncertainObservation::Certain { value } => {
                    out.push_str(&format!("{x},{value},certain\n"));
                }
                UncertainObservation::Uniform { low, high } => {
                    out.push_str(&format!("{x},{low},{high},uniform\n"));
                }
                UncertainObservation::Gaussian { mean, sigma } => {
                    out.push_str(&format!("{x},{mean},{sigma},gaussian\n"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serialization cannot fail")
    }

    /// SHA-256 over the canonical CSV form, hex-encoded. Used by run
    /// manifests to pin the exact data a result was computed from.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_csv().as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to string");
        }
        hex
    }
}
