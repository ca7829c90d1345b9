//! Envelope and least-squares properties that need chains or synthetic
//! posteriors: linear error propagation, the tolerance-shrink trend toward
//! the least-squares solution, and model comparison on shared data.

use bvm_core::analysis::{
    bvm_factor, least_squares_fit, predictive_envelope, BvmFactor, LeastSquaresOptions,
};
use bvm_core::data::DataSet;
use bvm_core::likelihood::LikelihoodKernel;
use bvm_core::models::model_by_name;
use bvm_core::sampler::{
    estimate_evidence, run_mcmc, ChainStep, McmcConfig, PosteriorChain, Prior, PriorComponent,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monod_data() -> DataSet<f64> {
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

/// For y = alpha * x and a synthetic chain alpha ~ N(mean, sd), the 1-sigma
/// envelope half-width at x must be |x| * sd up to subsampling error.
#[test]
fn linear_model_envelope_propagates_parameter_spread() {
    let model = model_by_name::<f64>("scale1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sd_alpha = 0.25;
    let n = 4000usize;
    let steps: Vec<ChainStep<f64>> = (0..n)
        .map(|_| {
            let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
            ChainStep {
                state: vec![2.0 + sd_alpha * z],
                ln_likelihood: 0.0,
                accepted: true,
            }
        })
        .collect();
    let chain = PosteriorChain {
        steps,
        accepted: n,
        proposed: n,
        burn_in_cutoff: 0,
        seed: 3,
        model_dim: 1,
    };
    let grid = [0.5f64, 1.0, 2.0, 5.0];
    let subsample = 2000;
    let envelope = predictive_envelope(&chain, model.as_ref(), &grid, subsample, &mut rng).unwrap();
    // standard error of a sample sd is roughly sd / sqrt(2 (n - 1))
    let se_factor = 1.0 / (2.0 * (subsample as f64 - 1.0)).sqrt();
    for (i, &x) in grid.iter().enumerate() {
        let expected = x.abs() * sd_alpha;
        let tolerance = 3.0 * expected * se_factor * 1.5;
        assert!(
            (envelope.half_width_1[i] - expected).abs() <= tolerance,
            "x {x}: hw {} expected {expected} tol {tolerance}",
            envelope.half_width_1[i]
        );
    }
}

/// Tightening the tolerance walks the posterior mean toward the
/// least-squares solution (distances in prior-sd units; majority of seeds).
#[test]
fn posterior_mean_approaches_least_squares_as_tolerance_shrinks() {
    let data = monod_data();
    let prior = monod_prior();
    let model = model_by_name::<f64>("monod").unwrap();
    let reference = least_squares_fit(
        model.as_ref(),
        &data,
        &[0.17, 47.5],
        &LeastSquaresOptions::default(),
    )
    .unwrap()
    .params;
    let distance = |mean: &[f64]| -> f64 {
        let d0 = (mean[0] - reference[0]) / 0.025;
        let d1 = (mean[1] - reference[1]) / 3.0;
        (d0 * d0 + d1 * d1).sqrt()
    };
    let mut monotone_seeds = 0;
    for seed in [1u64, 2, 3] {
        let mut distances = Vec::new();
        for eps in [0.03, 0.025, 0.02] {
            // long chains: the posterior-mean estimate has to be tighter
            // than the systematic shift between tolerance levels
            let cfg = McmcConfig::new(40_000, 0.2, seed);
            let chain = run_mcmc(
                &LikelihoodKernel::certain_eps(eps),
                &prior,
                model.as_ref(),
                &data,
                &cfg,
            )
            .unwrap();
            distances.push(distance(&chain.posterior_mean_params()));
        }
        if distances[0] >= distances[1] && distances[1] >= distances[2] {
            monotone_seeds += 1;
        }
    }
    assert!(
        monotone_seeds >= 2,
        "distance trend held for only {monotone_seeds} of 3 seeds"
    );
}

/// The smallest tolerance any parameter pair can satisfy on the growth data
/// sits near 0.017: a broad grid search over the best worst-case residual.
/// This is the feasibility threshold the epsilon studies straddle (0.01 is
/// infeasible, 0.02 and up are not).
#[test]
fn growth_study_feasibility_threshold_is_near_0_017() {
    let data = monod_data();
    let model = model_by_name::<f64>("monod").unwrap();
    let n = 400;
    let mut minimax = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let a1 = 0.07 + 0.2 * i as f64 / (n - 1) as f64;
            let a2 = 20.0 + 80.0 * j as f64 / (n - 1) as f64;
            let worst = data
                .inputs()
                .iter()
                .zip(data.centers())
                .map(|(&x, y)| (model.evaluate(x, &[a1, a2]).unwrap() - y).abs())
                .fold(0.0f64, f64::max);
            minimax = minimax.min(worst);
        }
    }
    assert!(
        (0.015..0.019).contains(&minimax),
        "grid minimax residual {minimax}"
    );
}

/// Least squares never reports a worse objective than its starting point.
#[test]
fn least_squares_objective_never_exceeds_the_start() {
    let data = monod_data();
    let model = model_by_name::<f64>("monod").unwrap();
    for init in [[0.17, 47.5], [0.1, 60.0], [0.3, 20.0]] {
        let start_objective: f64 = data
            .inputs()
            .iter()
            .zip(data.centers())
            .map(|(&x, y)| {
                let r = model.evaluate(x, &init).unwrap() - y;
                r * r
            })
            .sum();
        let fit = least_squares_fit(
            model.as_ref(),
            &data,
            &init,
            &LeastSquaresOptions::default(),
        )
        .unwrap();
        assert!(fit.objective <= start_objective + 1e-15);
    }
}

/// A saturating model beats a constant on the growth data under the same
/// agreement definition.
#[test]
fn richer_model_wins_the_evidence_ratio() {
    let data = monod_data();
    let monod = model_by_name::<f64>("monod").unwrap();
    let constant = model_by_name::<f64>("constant1").unwrap();
    let kernel = LikelihoodKernel::certain_eps(0.03);
    let monod_prior = monod_prior();
    let constant_prior = Prior::new(vec![PriorComponent::Gaussian {
        mean: 0.1,
        sd: 0.05,
    }])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let z_monod = estimate_evidence(
        &kernel,
        &monod_prior,
        monod.as_ref(),
        &data,
        100_000,
        &mut rng,
    )
    .unwrap();
    let z_constant = estimate_evidence(
        &kernel,
        &constant_prior,
        constant.as_ref(),
        &data,
        100_000,
        &mut rng,
    )
    .unwrap();
    match bvm_factor(z_monod.estimate, z_constant.estimate).unwrap() {
        BvmFactor::Ratio(r) => assert!(r > 1.0, "factor {r}"),
        BvmFactor::DecisivelyFavorsFirst => {}
    }
}
