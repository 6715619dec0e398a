//! Seeded random realizable samples for the shipped schemes, and a driver
//! that runs validity and stability checks over many of them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_stability, check_validity, ClosureScheme, CompressionScheme, SingletonScheme};
use crate::concept_class::{generate_class, ClassFamily, ConceptClass, Example, Label, Labeled};
use crate::error::{Error, Result};
use crate::simulation::trial_rng;
use crate::svm::{dot, SvmScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Singleton,
    Closure,
    Svm,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singleton" => Ok(SchemeKind::Singleton),
            "closure" => Ok(SchemeKind::Closure),
            "svm" => Ok(SchemeKind::Svm),
            other => Err(Error::invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrialSettings {
    /// Singleton domain size.
    pub singleton_points: usize,
    /// Interval grid size for the closure scheme.
    pub interval_grid: usize,
    pub svm_dim: usize,
    pub max_sample: usize,
}

impl Default for TrialSettings {
    fn default() -> Self {
        TrialSettings {
            singleton_points: 12,
            interval_grid: 10,
            svm_dim: 2,
            max_sample: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub scheme: SchemeKind,
    pub trials: usize,
    pub validity_pass: usize,
    pub stability_pass: usize,
    pub max_kappa_size: usize,
    pub declared_size: usize,
}

impl TrialSummary {
    pub fn all_pass(&self) -> bool {
        self.validity_pass == self.trials
            && self.stability_pass == self.trials
            && self.max_kappa_size <= self.declared_size
    }
}

/// Target singleton (or none) with points drawn from all but the last
/// domain point, which the reconstruction cannot step past.
pub fn singleton_sample(rng: &mut impl Rng, n: usize, max_len: usize) -> Vec<Example> {
    let target = rng.gen_range(0..n);
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let x = rng.gen_range(0..n - 1);
            Labeled::new(x, Label::from_bool(x == target))
        })
        .collect()
}

/// A random interval (or the empty one) labeling random grid points.
pub fn interval_sample(rng: &mut impl Rng, class: &ConceptClass, max_len: usize) -> Vec<Example> {
    let h = rng.gen_range(0..class.len());
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let x = rng.gen_range(0..class.domain_size());
            Labeled::new(x, class.predict(h, x))
        })
        .collect()
}

/// Points in the unit cube labeled by a random halfspace through the cube;
/// points within `1e-3` of the boundary are redrawn so the margin is
/// numerically meaningful. Some samples repeat points.
pub fn halfspace_sample(rng: &mut impl Rng, dim: usize, max_len: usize) -> Vec<Labeled<Vec<f64>>> {
    let w: Vec<f64> = loop {
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-3 {
            break w.into_iter().map(|v| v / norm).collect();
        }
    };
    let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
    let v = dot(&w, &c);
    let len = rng.gen_range(1..=max_len);
    let mut out: Vec<Labeled<Vec<f64>>> = Vec::with_capacity(len);
    while out.len() < len {
        if !out.is_empty() && rng.gen_bool(0.1) {
            let i = rng.gen_range(0..out.len());
            out.push(out[i].clone());
            continue;
        }
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let s = dot(&w, &x) - v;
        if s.abs() > 1e-3 {
            out.push(Labeled::new(x, Label::from_sign(s)));
        }
    }
    out
}

fn run<S, G>(scheme: &S, kind: SchemeKind, trials: usize, seed: u64, gen: G) -> TrialSummary
where
    S: CompressionScheme + Sync,
    S::Point: Send + Sync,
    G: Fn(&mut ChaCha8Rng) -> Vec<Labeled<S::Point>> + Sync,
{
    let outcomes: Vec<(bool, bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sample = gen(&mut trial_rng(seed, t as u64));
            let kappa = scheme.compress(&sample).map_or(usize::MAX, |k| k.len());
            (
                check_validity(scheme, &sample),
                check_stability(scheme, &sample),
                kappa,
            )
        })
        .collect();
    TrialSummary {
        scheme: kind,
        trials,
        validity_pass: outcomes.iter().filter(|o| o.0).count(),
        stability_pass: outcomes.iter().filter(|o| o.1).count(),
        max_kappa_size: outcomes.iter().map(|o| o.2).max().unwrap_or(0),
        declared_size: scheme.size(),
    }
}

/// Checks one scheme on `trials` seeded random realizable samples.
pub fn run_scheme_trials(
    kind: SchemeKind,
    trials: usize,
    seed: u64,
    settings: &TrialSettings,
) -> Result<TrialSummary> {
    if settings.max_sample == 0 {
        return Err(Error::invalid("max_sample must be positive"));
    }
    Ok(match kind {
        SchemeKind::Singleton => {
            let n = settings.singleton_points;
            if n < 2 {
                return Err(Error::invalid("singleton trials need at least 2 points"));
            }
            let scheme = SingletonScheme::new(n);
            run(&scheme, kind, trials, seed, |rng| {
                singleton_sample(rng, n, settings.max_sample)
            })
        }
        SchemeKind::Closure => {
            let class = generate_class(&ClassFamily::Intervals {
                grid: (1..=settings.interval_grid).map(|v| v as f64).collect(),
                include_empty: true,
            })?;
            let scheme = ClosureScheme::new(&class)?;
            run(&scheme, kind, trials, seed, |rng| {
                interval_sample(rng, &class, settings.max_sample)
            })
        }
        SchemeKind::Svm => {
            let scheme = SvmScheme::new(settings.svm_dim);
            run(&scheme, kind, trials, seed, |rng| {
                halfspace_sample(rng, settings.svm_dim, settings.max_sample)
            })
        }
    })
}
