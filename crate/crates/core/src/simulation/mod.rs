//! Finite-support PAC experiments with exact error evaluation.
//!
//! Every trial gets its own ChaCha8 stream keyed by (master seed, trial
//! index), so results do not depend on how trials are scheduled.

mod coupon;
mod lower_bounds;
mod svm_bench;

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concept_class::{ConceptClass, Labeled, LabeledSample};
use crate::error::{Error, Result};
use crate::learners::{Learner, TrainingRun};

pub use coupon::{coupon_collector, coupon_lemma_bound, CouponResult};
pub use lower_bounds::{
    hard_class_experiment, hard_class_instance, hard_class_level, hollow_star_experiment,
    hollow_star_masses, hollow_star_sample_threshold, HardInstance,
};
pub use svm_bench::{svm_bench, SvmBenchConfig, SvmBenchResult};

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const MASS_TOL: f64 = 1e-12;

/// Probability masses over domain points; zero masses are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<usize>,
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<usize>, probabilities: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probabilities.len() {
            return Err(Error::invalid(format!(
                "distribution needs matching non-empty support and masses, got {} and {}",
                support.len(),
                probabilities.len()
            )));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::invalid(format!("invalid probability mass {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("masses sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution {
            support,
            probabilities,
        })
    }

    /// Masses over points `0..n` in order.
    pub fn over_domain(probabilities: Vec<f64>) -> Result<Self> {
        Self::new((0..probabilities.len()).collect(), probabilities)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("uniform distribution over no points"));
        }
        let p = 1.0 / n as f64;
        let mut masses = vec![p; n];
        // absorb rounding so the sum check is exact to the last place
        masses[n - 1] = 1.0 - p * (n - 1) as f64;
        Self::over_domain(masses)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn mass_of(&self, point: usize) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|(&x, _)| x == point)
            .map(|(_, p)| p)
            .fold(0.0, |acc, p| acc + p)
    }

    pub fn sampler(&self) -> Sampler<'_> {
        Sampler {
            dist: self,
            index: WeightedIndex::new(&self.probabilities)
                .expect("masses validated at construction"),
        }
    }
}

pub struct Sampler<'a> {
    dist: &'a DiscreteDistribution,
    index: WeightedIndex<f64>,
}

impl Sampler<'_> {
    pub fn draw(&self, rng: &mut impl Rng) -> usize {
        self.dist.support[self.index.sample(rng)]
    }
}

/// A finite class with a data distribution and a target in the class.
#[derive(Clone, Debug)]
pub struct PacInstance {
    pub class: ConceptClass,
    pub distribution: DiscreteDistribution,
    pub target: usize,
}

impl PacInstance {
    pub fn new(
        class: ConceptClass,
        distribution: DiscreteDistribution,
        target: usize,
    ) -> Result<Self> {
        if target >= class.len() {
            return Err(Error::invalid(format!(
                "target {target} out of range for a class of {}",
                class.len()
            )));
        }
        if let Some(&x) = distribution
            .support()
            .iter()
            .find(|&&x| x >= class.domain_size())
        {
            return Err(Error::invalid(format!(
                "support point {x} outside the domain"
            )));
        }
        Ok(PacInstance {
            class,
            distribution,
            target,
        })
    }

    /// Exact probability mass of the points where `h` and the target differ.
    pub fn true_error(&self, h: usize) -> Result<f64> {
        if h >= self.class.len() {
            return Err(Error::invalid(format!("hypothesis {h} out of range")));
        }
        Ok(self
            .distribution
            .support()
            .iter()
            .zip(self.distribution.probabilities())
            .filter(|(&x, _)| self.class.predict(h, x) != self.class.predict(self.target, x))
            .map(|(_, p)| p)
            // fold from +0.0: an empty f64 sum is -0.0
            .fold(0.0, |acc, p| acc + p))
    }

    /// `n` i.i.d. points labeled by the target.
    pub fn draw_sample(&self, rng: &mut impl Rng, n: usize) -> LabeledSample {
        let sampler = self.distribution.sampler();
        (0..n)
            .map(|_| {
                let x = sampler.draw(rng);
                Labeled::new(x, self.class.predict(self.target, x))
            })
            .collect()
    }

    /// Trains `learner` on `n` draws and returns the exact error.
    fn trial(&self, learner: &dyn Learner, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let sample = self.draw_sample(rng, n);
        let run = TrainingRun {
            class: &self.class,
            sample: &sample,
            seed: rng.gen(),
            target: self.target,
        };
        self.true_error(learner.learn(&run)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub learner: String,
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub failures: usize,
    /// Fraction of trials with error strictly above epsilon.
    pub failure_rate: f64,
    pub wilson_95: (f64, f64),
    pub mean_error: f64,
    /// Nearest-rank quantiles of the per-trial errors, keyed `"q0.50"` etc.
    pub error_quantiles: BTreeMap<String, f64>,
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the endpoints are exactly 0 and 1 at the extremes; avoid rounding dust
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

pub const QUANTILES: [f64; 7] = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];

/// Lower nearest-rank quantiles of `values` (sorted in place).
pub fn quantiles(values: &mut [f64]) -> BTreeMap<String, f64> {
    values.sort_by(f64::total_cmp);
    QUANTILES
        .iter()
        .filter(|_| !values.is_empty())
        .map(|&q| {
            let idx = (q * (values.len() - 1) as f64).floor() as usize;
            (format!("q{q:.2}"), values[idx])
        })
        .collect()
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent error evaluations in parallel and aggregates.
/// A failing trial aborts the run with its index attached.
pub fn run_trials<F>(
    learner: String,
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
    f: F,
) -> Result<ExperimentResult>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            f(&mut trial_rng(seed, t as u64)).map_err(|e| Error::Trial {
                trial: t,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let failures = errors.iter().filter(|&&e| e > epsilon).count();
    let mean_error = errors.iter().sum::<f64>() / trials as f64;
    Ok(ExperimentResult {
        learner,
        n,
        epsilon,
        trials,
        failures,
        failure_rate: failures as f64 / trials as f64,
        wilson_95: wilson_interval(failures, trials),
        mean_error,
        error_quantiles: quantiles(&mut errors),
    })
}

/// Failure rate of `learner` at sample size `config.n`.
pub fn run_pac(
    learner: &dyn Learner,
    instance: &PacInstance,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    config.validate()?;
    run_trials(
        learner.name(),
        config.n,
        config.epsilon,
        config.trials,
        config.seed,
        |rng| instance.trial(learner, config.n, rng),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStep {
    pub n: usize,
    pub failure_rate: f64,
    pub wilson_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleComplexityEstimate {
    /// Smallest `n` found whose Wilson upper bound is at most delta;
    /// `None` when the search hit the cap first.
    pub n: Option<usize>,
    pub n_cap: usize,
    pub trace: Vec<SearchStep>,
}

/// Doubling then bisection for the smallest `n` whose failure rate has
/// Wilson upper bound at most `delta`. Each `n` reuses the master seed.
pub fn estimate_sample_complexity(
    learner: &dyn Learner,
    instance: &PacInstance,
    epsilon: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    n_cap: usize,
) -> Result<SampleComplexityEstimate> {
    let mut trace = Vec::new();
    let mut passes = |n: usize| -> Result<bool> {
        let config = ExperimentConfig {
            epsilon,
            delta,
            n,
            trials,
            seed,
        };
        let r = run_pac(learner, instance, &config)?;
        trace.push(SearchStep {
            n,
            failure_rate: r.failure_rate,
            wilson_upper: r.wilson_95.1,
        });
        Ok(r.wilson_95.1 <= delta)
    };
    if passes(0)? {
        return Ok(SampleComplexityEstimate {
            n: Some(0),
            n_cap,
            trace,
        });
    }
    let (mut lo, mut hi) = (0, 1);
    loop {
        if hi > n_cap {
            let capped = n_cap > lo && passes(n_cap)?;
            if !capped {
                return Ok(SampleComplexityEstimate {
                    n: None,
                    n_cap,
                    trace,
                });
            }
            hi = n_cap;
            break;
        }
        if passes(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SampleComplexityEstimate {
        n: Some(hi),
        n_cap,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept_class::{generate_class, ClassFamily};
    use crate::learners::{Erm, TargetOracle};
    use approx::assert_abs_diff_eq;

    fn singletons(n: usize) -> ConceptClass {
        generate_class(&ClassFamily::Singletons {
            n,
            augment_all_negative: false,
        })
        .unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::over_domain(vec![0.5, 0.5]).is_ok());
        assert!(DiscreteDistribution::over_domain(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::over_domain(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::over_domain(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0], vec![0.5, 0.5]).is_err());
        let u = DiscreteDistribution::uniform(7).unwrap();
        assert_abs_diff_eq!(u.probabilities().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_mass_points_are_never_drawn() {
        let d = DiscreteDistribution::over_domain(vec![0.5, 0.0, 0.5]).unwrap();
        let s = d.sampler();
        let mut rng = trial_rng(1, 0);
        assert!((0..2000).all(|_| s.draw(&mut rng) != 1));
    }

    #[test]
    fn true_error_examples() {
        let inst =
            PacInstance::new(singletons(4), DiscreteDistribution::uniform(4).unwrap(), 1).unwrap();
        assert_eq!(inst.true_error(1).unwrap(), 0.0);
        assert!(inst.true_error(1).unwrap().is_sign_positive());
        assert!(inst.distribution.mass_of(9).is_sign_positive());
        assert_abs_diff_eq!(inst.true_error(2).unwrap(), 0.5, epsilon = 1e-15);
        let d = DiscreteDistribution::over_domain(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let zero = PacInstance::new(singletons(4), d, 2).unwrap();
        assert_eq!(zero.true_error(3).unwrap(), 0.0);
        assert!(zero.true_error(9).is_err());
        assert!(
            PacInstance::new(singletons(4), DiscreteDistribution::uniform(5).unwrap(), 0).is_err()
        );
    }

    #[test]
    fn run_pac_controls() {
        let inst =
            PacInstance::new(singletons(4), DiscreteDistribution::uniform(4).unwrap(), 2).unwrap();
        let cfg = ExperimentConfig {
            epsilon: 0.1,
            delta: 0.1,
            n: 0,
            trials: 50,
            seed: 3,
        };
        assert_eq!(
            run_pac(&TargetOracle, &inst, &cfg).unwrap().failure_rate,
            0.0
        );
        let r = run_pac(&Erm, &inst, &cfg).unwrap();
        assert_eq!(r.failure_rate, 1.0);
        assert!(r.wilson_95.0 <= r.failure_rate && r.failure_rate <= r.wilson_95.1);
        let again = run_pac(&Erm, &inst, &cfg).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn wilson_values() {
        // reference values from statsmodels proportion_confint(method="wilson")
        let (lo, hi) = wilson_interval(50, 100);
        assert_abs_diff_eq!(lo, 0.403_831_530_4, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.596_168_469_6, epsilon = 1e-9);
        let (lo0, hi0) = wilson_interval(0, 100);
        assert_eq!(lo0, 0.0);
        assert_eq!(wilson_interval(100, 100).1, 1.0);
        assert_abs_diff_eq!(hi0, 0.036_993_498_2, epsilon = 1e-9);
    }

    #[test]
    fn quantiles_are_monotone() {
        let mut v = vec![0.3, 0.1, 0.9, 0.2, 0.5];
        let q = quantiles(&mut v);
        let vals: Vec<f64> = QUANTILES.iter().map(|q0| q[&format!("q{q0:.2}")]).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(q["q0.50"], 0.3);
    }

    #[test]
    fn sample_complexity_search() {
        let inst =
            PacInstance::new(singletons(6), DiscreteDistribution::uniform(6).unwrap(), 3).unwrap();
        let loose = estimate_sample_complexity(&Erm, &inst, 0.9, 0.1, 100, 5, 256).unwrap();
        assert_eq!(loose.n, Some(0));
        let tight = estimate_sample_complexity(&Erm, &inst, 0.05, 0.1, 200, 5, 256).unwrap();
        let mid = estimate_sample_complexity(&Erm, &inst, 0.2, 0.1, 200, 5, 256).unwrap();
        assert!(tight.n.unwrap() >= mid.n.unwrap());
        assert_eq!(
            tight,
            estimate_sample_complexity(&Erm, &inst, 0.05, 0.1, 200, 5, 256).unwrap()
        );
        let capped = estimate_sample_complexity(&Erm, &inst, 0.05, 0.1, 200, 5, 2).unwrap();
        assert_eq!(capped.n, None);
    }
}
