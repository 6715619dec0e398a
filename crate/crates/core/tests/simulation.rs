use hellylab::concept_class::{generate_class, ClassFamily};
use hellylab::learners::{AlgorithmA, Erm, TargetOracle};
use hellylab::simulation::{
    coupon_collector, coupon_lemma_bound, estimate_sample_complexity, hard_class_experiment,
    hollow_star_experiment, run_pac, DiscreteDistribution, ExperimentConfig, PacInstance,
};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn hollow_star_failure_decreases_with_n() {
    let rates: Vec<f64> = [4, 8, 13, 40, 200]
        .iter()
        .map(|&n| {
            hollow_star_experiment(32, 1.0 / 32.0, n, 1500, 3, &Erm)
                .unwrap()
                .failure_rate
        })
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] + 0.03, "{rates:?}");
    }
    assert!(rates[4] < rates[0], "{rates:?}");
}

#[test]
fn oracle_never_fails() {
    let r = hollow_star_experiment(16, 1.0 / 16.0, 5, 200, 1, &TargetOracle).unwrap();
    assert_eq!(r.failures, 0);
    assert_eq!(r.mean_error, 0.0);
}

#[test]
fn coupon_tail_is_small_below_bound() {
    let r = coupon_collector(100, 10, 4000, 21).unwrap();
    assert!((r.lemma_bound - coupon_lemma_bound(100, 10)).abs() < 1e-12);
    assert!(r.at_or_below_bound <= 0.5 + 0.02, "{r:?}");
    assert!(r.median >= r.lemma_bound);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = || {
        (
            hollow_star_experiment(32, 1.0 / 32.0, 13, 400, 5, &Erm).unwrap(),
            hollow_star_experiment(8, 1.0 / 8.0, 20, 100, 5, &AlgorithmA { k: 8 }).unwrap(),
            hard_class_experiment(2, 4, 0.1, 10, 200, 5, &Erm).unwrap(),
            coupon_collector(50, 5, 500, 5).unwrap(),
        )
    };
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(format!("{one:?}"), format!("{four:?}"));
}

#[test]
fn pac_error_shrinks_and_estimate_is_found() {
    let class = generate_class(&ClassFamily::Thresholds {
        grid: (1..=20).map(f64::from).collect(),
        augment_all_negative: true,
    })
    .unwrap();
    let dist = DiscreteDistribution::uniform(class.domain_size()).unwrap();
    let inst = PacInstance::new(class, dist, 7).unwrap();
    let cfg = |n| ExperimentConfig {
        epsilon: 0.1,
        delta: 0.1,
        n,
        trials: 400,
        seed: 2,
    };
    let small = run_pac(&Erm, &inst, &cfg(5)).unwrap();
    let large = run_pac(&Erm, &inst, &cfg(80)).unwrap();
    assert!(large.mean_error < small.mean_error);
    assert!(large.failure_rate <= small.failure_rate);
    let est = estimate_sample_complexity(&Erm, &inst, 0.1, 0.1, 400, 2, 1024).unwrap();
    let n = est.n.expect("thresholds are learnable well below the cap");
    assert!(n <= 80, "{est:?}");
}
