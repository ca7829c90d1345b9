//! Run artifacts: chain CSV, envelope CSV, posterior summary JSON, and the
//! run manifest that makes a run bit-reproducible (config echo, seed, and
//! dataset hash).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::PredictiveEnvelope;
use crate::config::RunConfig;
use crate::sampler::PosteriorChain;
use crate::scalar::Scalar;

/// Chain in CSV form: one row per iteration (row 0 is the initial state),
/// columns `iteration,accepted,<params...>,log_likelihood`. Floats print in
/// shortest round-trip form, so identical chains produce identical bytes.
pub fn chain_to_csv<F: Scalar>(chain: &PosteriorChain<F>, param_names: &[String]) -> String {
    let mut out = String::new();
    out.push_str("iteration,accepted");
    for name in param_names {
        let _ = write!(out, ",{name}");
    }
    out.push_str(",log_likelihood\n");
    for (i, step) in chain.steps.iter().enumerate() {
        let _ = write!(out, "{},{}", i, u8::from(step.accepted));
        for value in &step.state {
            let _ = write!(out, ",{value}");
        }
        let _ = writeln!(out, ",{}", step.ln_likelihood);
    }
    out
}

/// Envelope in CSV form: `x,mean,hw1,hw2,hw3`.
pub fn envelope_to_csv<F: Scalar>(envelope: &PredictiveEnvelope<F>) -> String {
    let mut out = String::from("x,mean,hw1,hw2,hw3\n");
    for i in 0..envelope.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            envelope.grid[i],
            envelope.mean_response[i],
            envelope.half_width_1[i],
            envelope.half_width_2[i],
            envelope.half_width_3[i],
        );
    }
    out
}

/// Output file names inside a run directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFiles {
    pub chain_csv: String,
    pub summary_json: String,
    pub envelope_csv: String,
}

impl Default for OutputFiles {
    fn default() -> Self {
        Self {
            chain_csv: "chain.csv".into(),
            summary_json: "posterior_summary.json".into(),
            envelope_csv: "envelope.csv".into(),
        }
    }
}

/// Everything needed to reproduce and audit a calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub seed: u64,
    pub dataset_hash: String,
    pub evidence_estimate: f64,
    pub evidence_std_error: f64,
    pub evidence_draws: usize,
    pub acceptance_rate: f64,
    pub post_burn_in_samples: usize,
    pub wall_time_seconds: f64,
    pub outputs: OutputFiles,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Evidence command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub label: String,
    pub kernel: String,
    pub dataset_hash: String,
    pub draws: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

/// Model-selection command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub model_a: String,
    pub model_b: String,
    pub evidence_a: f64,
    pub evidence_b: f64,
    pub std_error_a: f64,
    pub std_error_b: f64,
    /// `Z_a / Z_b` when defined.
    pub factor: Option<f64>,
    /// Set when `Z_b == 0 < Z_a`: the ratio is off the scale.
    pub decisive: bool,
    pub favored: String,
}

/// Write a string artifact, creating the directory if needed.
pub fn write_text(dir: &Path, name: &str, text: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}
