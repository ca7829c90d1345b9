//! Sampler correctness against independent oracles: a grid-quadrature
//! posterior, stationary flow balance, and evidence bounds.

use bvm_core::agreement::Tolerance;
use bvm_core::data::{DataSet, UncertainObservation};
use bvm_core::likelihood::LikelihoodKernel;
use bvm_core::models::model_by_name;
use bvm_core::sampler::{estimate_evidence, run_mcmc, McmcConfig, Prior, PriorComponent};
use bvm_core::stats::ln_normal_pdf;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scale_setup() -> (Prior<f64>, DataSet<f64>, LikelihoodKernel<f64>) {
    let data = DataSet::new(
        "line",
        vec![1.0, 2.0, 3.0],
        vec![
            UncertainObservation::gaussian(2.1, 0.5).unwrap(),
            UncertainObservation::gaussian(3.9, 0.5).unwrap(),
            UncertainObservation::gaussian(6.2, 0.5).unwrap(),
        ],
    )
    .unwrap();
    let prior = Prior::new(vec![PriorComponent::Gaussian { mean: 2.0, sd: 0.5 }]).unwrap();
    let kernel = LikelihoodKernel::BvmGaussianEps {
        tolerance: Tolerance::Uniform(0.3),
    };
    (prior, data, kernel)
}

/// Histogram of a one-parameter chain against a quadrature posterior on the
/// same bins: total variation distance below 0.05.
#[test]
fn one_parameter_chain_matches_grid_quadrature_posterior() {
    let (prior, data, kernel) = scale_setup();
    let model = model_by_name::<f64>("scale1").unwrap();

    // quadrature oracle over a 10^4-point grid spanning the prior's bulk
    let (lo, hi) = (0.0, 4.0);
    let grid_points = 10_000usize;
    let step = (hi - lo) / grid_points as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut density = Vec::with_capacity(grid_points);
    for g in 0..grid_points {
        let alpha = lo + step * (g as f64 + 0.5);
        let ln_prior = ln_normal_pdf(alpha, 2.0, 0.5);
        let ln_lik = kernel
            .ln_likelihood(model.as_ref(), &[alpha], None, &data, &mut rng)
            .unwrap();
        density.push((ln_prior + ln_lik).exp());
    }
    let total: f64 = density.iter().sum();

    // chain histogram on coarse bins over the same range
    let bins = 50usize;
    let cfg = McmcConfig {
        iterations: 400_000,
        burn_in_fraction: 0.1,
        proposal_scales: Some(vec![0.15]),
        initial_state: None,
        seed: 99,
    };
    let chain = run_mcmc(&kernel, &prior, model.as_ref(), &data, &cfg).unwrap();
    let post = chain.post_burn_in();
    let mut chain_mass = vec![0.0f64; bins];
    for step_record in post {
        let alpha = step_record.state[0];
        let bin = (((alpha - lo) / (hi - lo)) * bins as f64).floor();
        let bin = bin.clamp(0.0, bins as f64 - 1.0) as usize;
        chain_mass[bin] += 1.0;
    }
    for mass in &mut chain_mass {
        *mass /= post.len() as f64;
    }
    let cells_per_bin = grid_points / bins;
    let mut tv = 0.0;
    for b in 0..bins {
        let oracle_mass: f64 = density[b * cells_per_bin..(b + 1) * cells_per_bin]
            .iter()
            .sum::<f64>()
            / total;
        tv += (chain_mass[b] - oracle_mass).abs();
    }
    tv /= 2.0;
    assert!(tv < 0.05, "total variation {tv}");
}

/// Stationary flow balance across a 3-bin lumping of the state space: for a
/// reversible chain in equilibrium the cross-bin transition counts must
/// match pairwise. (With only 2 bins the counts alternate and the check is
/// vacuous, so 3 bins is the smallest real test.)
#[test]
fn discretized_flow_balance_holds() {
    let (prior, data, kernel) = scale_setup();
    let model = model_by_name::<f64>("scale1").unwrap();
    let cfg = McmcConfig {
        iterations: 200_000,
        burn_in_fraction: 0.2,
        proposal_scales: Some(vec![0.2]),
        initial_state: None,
        seed: 7,
    };
    let chain = run_mcmc(&kernel, &prior, model.as_ref(), &data, &cfg).unwrap();
    let post = chain.post_burn_in();
    let cuts = [1.95f64, 2.15];
    let bin_of = |alpha: f64| -> usize {
        if alpha < cuts[0] {
            0
        } else if alpha < cuts[1] {
            1
        } else {
            2
        }
    };
    let mut counts = [[0u64; 3]; 3];
    for window in post.windows(2) {
        counts[bin_of(window[0].state[0])][bin_of(window[1].state[0])] += 1;
    }
    for (i, row) in counts.iter().enumerate() {
        for j in (i + 1)..3 {
            let forward = row[j] as f64;
            let backward = counts[j][i] as f64;
            let se = (forward + backward).sqrt().max(1.0);
            assert!(
                (forward - backward).abs() <= 3.0 * se,
                "flow {i}->{j}: {forward} vs {backward} (se {se})"
            );
        }
    }
}

/// The prior Monte Carlo evidence lies inside the sampled likelihood range,
/// and inside [0, 1] for indicator kernels.
#[test]
fn evidence_respects_likelihood_bounds() {
    let (prior, data, kernel) = scale_setup();
    let model = model_by_name::<f64>("scale1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let estimate =
        estimate_evidence(&kernel, &prior, model.as_ref(), &data, 5000, &mut rng).unwrap();
    assert!(estimate.estimate > 0.0);
    assert!(estimate.estimate < 1.0);

    // certain-data indicator kernel: evidence is a probability
    let certain = DataSet::certain("c", vec![1.0, 2.0, 3.0], vec![2.1, 3.9, 6.2]).unwrap();
    let indicator = LikelihoodKernel::certain_eps(0.4);
    let estimate =
        estimate_evidence(&indicator, &prior, model.as_ref(), &certain, 5000, &mut rng).unwrap();
    assert!((0.0..=1.0).contains(&estimate.estimate));
}

/// An explicit feasible start is honored exactly; an explicit start outside
/// the prior support falls back to the search.
#[test]
fn explicit_initial_state_is_used() {
    let (prior, data, kernel) = scale_setup();
    let model = model_by_name::<f64>("scale1").unwrap();
    let mut cfg = McmcConfig::new(200, 0.1, 5);
    cfg.initial_state = Some(vec![2.05]);
    let chain = run_mcmc(&kernel, &prior, model.as_ref(), &data, &cfg).unwrap();
    assert_eq!(chain.steps[0].state, vec![2.05]);

    // far outside the prior bulk the likelihood is still positive here, so
    // use a uniform prior to create a true zero-density start
    let boxed_prior = Prior::new(vec![PriorComponent::Uniform {
        low: 1.5,
        high: 2.5,
    }])
    .unwrap();
    cfg.initial_state = Some(vec![9.0]);
    let chain = run_mcmc(&kernel, &boxed_prior, model.as_ref(), &data, &cfg).unwrap();
    let start = chain.steps[0].state[0];
    assert!((1.5..=2.5).contains(&start), "fallback start {start}");
}
