//! Failure rates on the hollow-star and hard-class lower-bound instances.
//!
//! cargo run --release --example lower_bounds

use hellylab::learners::{AlgorithmA, Erm, Learner};
use hellylab::simulation::{
    hard_class_experiment, hollow_star_experiment, hollow_star_sample_threshold, ExperimentResult,
};

fn report(n: usize, r: ExperimentResult) {
    println!(
        "  {:<10} n={n:<4} failure {:.3} [{:.3}, {:.3}]",
        r.learner, r.failure_rate, r.wilson_95.0, r.wilson_95.1
    );
}

fn main() -> hellylab::Result<()> {
    let (k, eps) = (32, 1.0 / 32.0);
    println!(
        "hollow star k={k} eps={eps}: threshold n = {:.2}",
        hollow_star_sample_threshold(k, eps)
    );
    for n in [4, 13, 40, 200] {
        report(n, hollow_star_experiment(k, eps, n, 1000, 1, &Erm)?);
    }
    // A branches k + 1 ways per level, so it gets a smaller instance.
    let (k, eps) = (8, 1.0 / 8.0);
    println!(
        "hollow star k={k} eps={eps}: threshold n = {:.2}",
        hollow_star_sample_threshold(k, eps)
    );
    let learners: [&dyn Learner; 2] = [&Erm, &AlgorithmA { k }];
    for learner in learners {
        for n in [4, 13, 40] {
            report(n, hollow_star_experiment(k, eps, n, 200, 1, learner)?);
        }
    }
    println!("hard class d=2 k_w=5 eps=0.05");
    for n in [5, 20, 80] {
        let r = hard_class_experiment(2, 5, 0.05, n, 500, 1, &Erm)?;
        println!(
            "  n={n:<3} failure {:.3} mean error {:.4}",
            r.failure_rate, r.mean_error
        );
    }
    Ok(())
}
