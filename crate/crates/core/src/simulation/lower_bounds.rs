//! The two lower-bound instances: a hollow star on singletons, and the
//! grouped class with VC dimension `d` and dual Helly number `k_w`.

use rand::seq::index;
use rand::Rng;

use super::{run_trials, DiscreteDistribution, ExperimentResult, PacInstance};
use crate::concept_class::{generate_class, hard_class_index, ClassFamily, ConceptClass};
use crate::error::{Error, Result};
use crate::learners::Learner;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

/// Masses for the singleton hollow-star instance with the unseen point at
/// 0-based index `i_star`: zero there, `eps/(1-eps)` on every other point
/// except the first, which takes the rest.
pub fn hollow_star_masses(k: usize, epsilon: f64, i_star: usize) -> Result<Vec<f64>> {
    check_unit("epsilon", epsilon)?;
    if k < 3 {
        return Err(Error::invalid(format!(
            "hollow star experiment needs k >= 3, got {k}"
        )));
    }
    if epsilon > 1.0 / k as f64 {
        return Err(Error::invalid(format!(
            "epsilon {epsilon} exceeds 1/k = {}",
            1.0 / k as f64
        )));
    }
    if i_star == 0 || i_star >= k {
        return Err(Error::invalid(format!(
            "unseen point must be in 1..{k}, got {i_star}"
        )));
    }
    let p = epsilon / (1.0 - epsilon);
    let mut masses = vec![p; k];
    masses[i_star] = 0.0;
    masses[0] = 1.0 - (k - 2) as f64 * p;
    Ok(masses)
}

/// Sample sizes below `(1/8) ((1-eps)/eps) ln(k-2)` fail with probability
/// at least 3/16 for every proper learner.
pub fn hollow_star_sample_threshold(k: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon) / epsilon * ((k - 2) as f64).ln() / 8.0
}

/// Failure rate of `learner` on singletons over `k` points, with the target
/// drawn uniformly from the singletons at points `2..=k` per trial.
pub fn hollow_star_experiment(
    k: usize,
    epsilon: f64,
    n: usize,
    trials: usize,
    seed: u64,
    learner: &dyn Learner,
) -> Result<ExperimentResult> {
    hollow_star_masses(k, epsilon, 1)?;
    let class = generate_class(&ClassFamily::Singletons {
        n: k,
        augment_all_negative: false,
    })?;
    run_trials(learner.name(), n, epsilon, trials, seed, |rng| {
        let i_star = rng.gen_range(1..k);
        let dist = DiscreteDistribution::over_domain(hollow_star_masses(k, epsilon, i_star)?)?;
        let inst = PacInstance::new(class.clone(), dist, i_star)?;
        inst.trial(learner, n, rng)
    })
}

/// The group whose hypotheses carry the instance:
/// `min(floor((d-1)/(4 eps)) + d - 1, k_w + d - 2)`.
pub fn hard_class_level(d: usize, k_w: usize, epsilon: f64) -> Result<usize> {
    check_unit("epsilon", epsilon)?;
    if d < 2 {
        return Err(Error::invalid(format!(
            "hard class experiment needs d >= 2, got {d}"
        )));
    }
    if k_w < d + 1 {
        return Err(Error::invalid(format!(
            "hard class needs k_w >= d + 1, got k_w = {k_w}"
        )));
    }
    let ratio = (d - 1) as f64 / (4.0 * epsilon);
    if ratio < 1.0 {
        return Err(Error::invalid(format!(
            "epsilon {epsilon} too large: need epsilon <= (d-1)/4 = {}",
            (d - 1) as f64 / 4.0
        )));
    }
    Ok((ratio.floor() as usize + d - 1).min(k_w + d - 2))
}

/// One draw of the hard instance.
#[derive(Clone, Debug)]
pub struct HardInstance {
    pub level: usize,
    /// 1-based second coordinates of the target's positives in its group.
    pub chosen: Vec<usize>,
    pub instance: PacInstance,
}

/// Builds the instance for a given `J*`: mass `4 eps/(d-1)` on each
/// negative point of group `i_eps` under the target, the rest on the
/// uninformative point `(d-1, 1)`.
pub fn hard_class_instance(
    class: &ConceptClass,
    d: usize,
    k_w: usize,
    epsilon: f64,
    chosen: &[usize],
) -> Result<HardInstance> {
    let level = hard_class_level(d, k_w, epsilon)?;
    if chosen.len() != d - 1 || chosen.iter().any(|&j| j == 0 || j > level) {
        return Err(Error::invalid(format!(
            "J* must hold {} distinct values in 1..={level}",
            d - 1
        )));
    }
    let target = hard_class_index(class, level, chosen)
        .ok_or_else(|| Error::invalid("J* does not name a hypothesis of the class"))?;
    let per_point = 4.0 * epsilon / (d - 1) as f64;
    let mut masses = vec![0.0; class.domain_size()];
    let mut spent = 0.0;
    for j in (1..=level).filter(|j| !chosen.contains(j)) {
        let x = class
            .point_index(&format!("({level},{j})"))
            .ok_or_else(|| Error::invalid("class is not a hard class"))?;
        masses[x] = per_point;
        spent += per_point;
    }
    let sink = class
        .point_index(&format!("({},1)", d - 1))
        .ok_or_else(|| Error::invalid("class is not a hard class"))?;
    masses[sink] = 1.0 - spent;
    let dist = DiscreteDistribution::over_domain(masses)?;
    Ok(HardInstance {
        level,
        chosen: chosen.to_vec(),
        instance: PacInstance::new(class.clone(), dist, target)?,
    })
}

/// Failure rate of `learner` on the hard class with `J*` drawn uniformly
/// per trial.
pub fn hard_class_experiment(
    d: usize,
    k_w: usize,
    epsilon: f64,
    n: usize,
    trials: usize,
    seed: u64,
    learner: &dyn Learner,
) -> Result<ExperimentResult> {
    let level = hard_class_level(d, k_w, epsilon)?;
    let class = generate_class(&ClassFamily::Hard { d, k_w })?;
    run_trials(learner.name(), n, epsilon, trials, seed, |rng| {
        let mut chosen: Vec<usize> = index::sample(rng, level, d - 1)
            .into_iter()
            .map(|j| j + 1)
            .collect();
        chosen.sort_unstable();
        let inst = hard_class_instance(&class, d, k_w, epsilon, &chosen)?;
        inst.instance.trial(learner, n, rng)
    })
}
