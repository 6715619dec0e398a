//! A learning curve on thresholds under a skewed distribution, and the
//! smallest sample size meeting (epsilon, delta).
//!
//! cargo run --release --example pac

use hellylab::concept_class::{generate_class, ClassFamily};
use hellylab::learners::{AlgorithmAErm, Erm, Learner};
use hellylab::simulation::{
    estimate_sample_complexity, run_pac, DiscreteDistribution, ExperimentConfig, PacInstance,
};

fn main() -> hellylab::Result<()> {
    let class = generate_class(&ClassFamily::Thresholds {
        grid: (1..=16).map(f64::from).collect(),
        augment_all_negative: true,
    })?;
    let weights: Vec<f64> = (1..=16).map(f64::from).collect();
    let total: f64 = weights.iter().sum();
    let dist = DiscreteDistribution::over_domain(weights.iter().map(|w| w / total).collect())?;
    let inst = PacInstance::new(class, dist, 9)?;
    let (epsilon, delta) = (0.1, 0.1);

    let learners: [&dyn Learner; 2] = [&Erm, &AlgorithmAErm { k: 2 }];
    for learner in learners {
        for n in [4, 16, 64] {
            let r = run_pac(
                learner,
                &inst,
                &ExperimentConfig {
                    epsilon,
                    delta,
                    n,
                    trials: 500,
                    seed: 5,
                },
            )?;
            println!(
                "{:<10} n={n:<3} failure {:.3} mean error {:.4}",
                r.learner, r.failure_rate, r.mean_error
            );
        }
        let est = estimate_sample_complexity(learner, &inst, epsilon, delta, 500, 5, 1024)?;
        println!(
            "{:<10} estimated n(eps, delta) = {:?}",
            learner.name(),
            est.n
        );
    }
    Ok(())
}
