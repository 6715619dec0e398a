use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_rng, wilson_interval};
use crate::compression::generalization_bound;
use crate::concept_class::Label;
use crate::error::{Error, Result};
use crate::svm::{dot, hard_margin_svm, Halfspace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmBenchConfig {
    pub dimension: usize,
    pub support_size: usize,
    pub m: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvmBenchResult {
    pub config: SvmBenchConfig,
    /// Stable-compression bound with size `n + 1`.
    pub bound: f64,
    pub exceed_count: usize,
    /// Fraction of trials whose exact error is at least the bound.
    pub exceed_fraction: f64,
    pub wilson_95: (f64, f64),
    pub mean_error: f64,
    pub max_error: f64,
    /// Instances discarded because a support point sat on the target boundary.
    pub redraws: usize,
}

/// Support points and their target labels; `None` if some point lies so
/// close to the boundary that separability is numerically doubtful.
fn draw_instance(
    rng: &mut impl Rng,
    dim: usize,
    support: usize,
) -> Option<(Vec<Vec<f64>>, Vec<Label>)> {
    let points: Vec<Vec<f64>> = (0..support)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let mut w: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dot(&w, &w).sqrt();
    if norm == 0.0 {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= norm);
    let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
    let target = Halfspace {
        threshold: dot(&w, &c),
        weights: w,
    };
    if points.iter().any(|p| target.score(p).abs() < 1e-9) {
        return None;
    }
    let labels = points.iter().map(|p| target.predict(p)).collect();
    Some((points, labels))
}

/// Trains hard-margin SVM on `m` uniform draws from a random separable
/// finite-support instance and compares the exact error with the bound.
pub fn svm_bench(config: &SvmBenchConfig) -> Result<SvmBenchResult> {
    let &SvmBenchConfig {
        dimension,
        support_size,
        m,
        delta,
        trials,
        seed,
    } = config;
    if dimension == 0 || support_size == 0 || trials == 0 {
        return Err(Error::invalid(
            "dimension, support size and trials must be positive",
        ));
    }
    let bound = generalization_bound(dimension + 1, m, delta)?;
    let outcomes: Vec<(f64, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, usize)> {
            let mut rng = trial_rng(seed, t as u64);
            let mut redraws = 0;
            let (points, labels) = loop {
                match draw_instance(&mut rng, dimension, support_size) {
                    Some(inst) => break inst,
                    None => redraws += 1,
                }
            };
            let draws: Vec<usize> = (0..m).map(|_| rng.gen_range(0..support_size)).collect();
            let xs: Vec<Vec<f64>> = draws.iter().map(|&i| points[i].clone()).collect();
            let ys: Vec<Label> = draws.iter().map(|&i| labels[i]).collect();
            let h = hard_margin_svm(&xs, &ys)
                .map_err(|e| Error::Trial {
                    trial: t,
                    source: Box::new(e),
                })?
                .hypothesis;
            let wrong = points
                .iter()
                .zip(&labels)
                .filter(|(p, &y)| h.predict(p) != y)
                .count();
            Ok((wrong as f64 / support_size as f64, redraws))
        })
        .collect::<Result<_>>()?;
    let exceed_count = outcomes.iter().filter(|o| o.0 >= bound).count();
    Ok(SvmBenchResult {
        config: *config,
        bound,
        exceed_count,
        exceed_fraction: exceed_count as f64 / trials as f64,
        wilson_95: wilson_interval(exceed_count, trials),
        mean_error: outcomes.iter().map(|o| o.0).sum::<f64>() / trials as f64,
        max_error: outcomes.iter().map(|o| o.0).fold(0.0, f64::max),
        redraws: outcomes.iter().map(|o| o.1).sum(),
    })
}
