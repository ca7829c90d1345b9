//! Calibration and validation of parametric models driven by user-defined
//! model-data agreement.
//!
//! The toolkit regresses deterministic parametric models against data of any
//! uncertainty class — completely certain values, bounded uniform intervals,
//! or Gaussians — by scoring parameters with the *probability of agreement*
//! under a chosen Boolean definition (every residual within a tolerance, a
//! mean-error bound, a coverage requirement, or their combinations) instead
//! of the classical exact-reproduction likelihood. That makes regression
//! possible in regimes where the classical evidence is identically zero
//! (truncated or certain data against a deterministic model), and turns the
//! agreement tolerance into an explicit control over posterior spread and
//! predictive envelopes.
//!
//! The pieces:
//!
//! * [`data`]: datasets of uncertain observations, CSV/JSON ingestion;
//! * [`models`]: the parametric model trait and the built-in model zoo,
//!   including an implicit-equation energy dissipation model;
//! * [`agreement`]: the Boolean agreement family;
//! * [`likelihood`]: classical and agreement-based likelihood kernels,
//!   analytic where closed forms exist and Monte Carlo elsewhere;
//! * [`sampler`]: random-walk Metropolis-Hastings, prior Monte Carlo
//!   evidence, posterior-averaged reliability, tolerance auto-tuning;
//! * [`analysis`]: predictive envelopes, posterior summaries, evidence
//!   ratios, and a least-squares baseline;
//! * [`scenarios`]: canned seed-reproducible studies with machine-checkable
//!   expectations;
//! * [`config`], [`runner`], [`report`]: the JSON run-config schema, the
//!   execution pipeline, and run artifacts (chain CSV, envelope CSV,
//!   manifest).
//!
//! The numeric core is generic over the floating-point type via
//! [`scalar::Scalar`]; the aliases below fix `f64`, which is what the file
//! formats and the CLI use.

pub mod agreement;
pub mod analysis;
pub mod config;
pub mod data;
pub mod likelihood;
pub mod models;
pub mod report;
pub mod runner;
pub mod sampler;
pub mod scalar;
pub mod scenarios;
pub mod stats;

pub use scalar::{cast, Scalar};

/// Working precision of the file formats and the CLI.
pub type Real = f64;

pub type Observation = data::UncertainObservation<Real>;
pub type Dataset = data::DataSet<Real>;
pub type Agreement = agreement::AgreementSpec<Real>;
pub type ToleranceSpec = agreement::Tolerance<Real>;
pub type Kernel = likelihood::LikelihoodKernel<Real>;
pub type Prior = sampler::Prior<Real>;
pub type PriorComponent = sampler::PriorComponent<Real>;
pub type McmcConfig = sampler::McmcConfig<Real>;
pub type Chain = sampler::PosteriorChain<Real>;
pub type Envelope = analysis::PredictiveEnvelope<Real>;
pub type Summary = analysis::PosteriorSummary<Real>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_aliases_line_up_with_generics() {
        let obs: Observation = data::UncertainObservation::certain(1.0);
        assert_eq!(obs.center(), 1.0 as Real);
        let spec: Agreement = agreement::AgreementSpec::epsilon(0.5);
        assert!(spec.holds(&[0.0], &[0.3], None).unwrap());
    }

    #[test]
    fn core_math_also_instantiates_in_f32() {
        use rand::SeedableRng;

        let data = data::DataSet::<f32>::certain("d", vec![0.0, 1.0], vec![0.1, 0.9]).unwrap();
        let model = models::model_by_name::<f32>("linear2").unwrap();
        let prior = sampler::Prior::new(vec![
            sampler::PriorComponent::Gaussian {
                mean: 1.0f32,
                sd: 0.5,
            },
            sampler::PriorComponent::Gaussian {
                mean: 0.0f32,
                sd: 0.5,
            },
        ])
        .unwrap();
        let kernel = likelihood::LikelihoodKernel::certain_eps(0.5f32);
        let cfg = sampler::McmcConfig::new(500, 0.1f32, 9);
        let chain = sampler::run_mcmc(&kernel, &prior, model.as_ref(), &data, &cfg).unwrap();
        assert!(chain.post_burn_in().len() > 100);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let evidence =
            sampler::estimate_evidence(&kernel, &prior, model.as_ref(), &data, 500, &mut rng)
                .unwrap();
        assert!(evidence.estimate > 0.0f32);
    }
}
