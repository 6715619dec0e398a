//! ERM, majority vote with abstention, agreement regions, the projection
//! operator and the two recursive proper learners.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::concept_class::{ConceptClass, Example, Label, LabeledSample};
use crate::error::{Error, Result};

/// Majority vote of a multiset at one point. Exact ties abstain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorityLabel {
    Negative,
    Positive,
    Abstain,
}

impl MajorityLabel {
    pub fn label(self) -> Option<Label> {
        match self {
            MajorityLabel::Negative => Some(Label::Negative),
            MajorityLabel::Positive => Some(Label::Positive),
            MajorityLabel::Abstain => None,
        }
    }
}

/// Non-empty multiset of hypothesis indices; repeats count with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisMultiset {
    entries: Vec<usize>,
}

impl HypothesisMultiset {
    pub fn new(class: &ConceptClass, entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("hypothesis multiset must be non-empty"));
        }
        if let Some(&bad) = entries.iter().find(|&&h| h >= class.len()) {
            return Err(Error::invalid(format!(
                "hypothesis index {bad} out of range for a class of {}",
                class.len()
            )));
        }
        Ok(HypothesisMultiset { entries })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn positives_at(&self, class: &ConceptClass, x: usize) -> usize {
        self.entries
            .iter()
            .filter(|&&h| class.predict(h, x).is_positive())
            .count()
    }
}

/// Lowest-index hypothesis consistent with every entry.
pub fn erm(class: &ConceptClass, sample: &LabeledSample) -> Result<usize> {
    sample.validate(class)?;
    (0..class.len())
        .find(|&h| class.agrees(h, sample))
        .ok_or(Error::Unrealizable)
}

pub fn majority_label(
    class: &ConceptClass,
    multiset: &HypothesisMultiset,
    point: usize,
) -> MajorityLabel {
    let n = multiset.len();
    let pos = multiset.positives_at(class, point);
    if 2 * pos > n {
        MajorityLabel::Positive
    } else if 2 * (n - pos) > n {
        MajorityLabel::Negative
    } else {
        MajorityLabel::Abstain
    }
}

/// Points where fewer than `|H'|/l` members disagree with the majority.
pub fn agreement_region(
    class: &ConceptClass,
    multiset: &HypothesisMultiset,
    l: usize,
) -> Result<Vec<usize>> {
    if l < 2 {
        return Err(Error::invalid(format!(
            "agreement region needs l >= 2, got {l}"
        )));
    }
    let n = multiset.len();
    Ok((0..class.domain_size())
        .filter(|&x| {
            let pos = multiset.positives_at(class, x);
            let disagree = match majority_label(class, multiset, x) {
                MajorityLabel::Positive => n - pos,
                MajorityLabel::Negative => pos,
                MajorityLabel::Abstain => return false,
            };
            disagree * l < n
        })
        .collect())
}

/// Lowest-index hypothesis matching the majority on the agreement region at `k`.
pub fn project(class: &ConceptClass, multiset: &HypothesisMultiset, k: usize) -> Result<usize> {
    let region = agreement_region(class, multiset, k)?;
    let votes: Vec<(usize, Label)> = region
        .into_iter()
        .filter_map(|x| majority_label(class, multiset, x).label().map(|l| (x, l)))
        .collect();
    (0..class.len())
        .find(|&h| votes.iter().all(|&(x, l)| class.predict(h, x) == l))
        .ok_or(Error::NoProjection { k })
}

/// Child seed for recursion branch `branch`, via a splitmix64 step.
pub fn derive_seed(seed: u64, branch: u64) -> u64 {
    let mut z = seed.wrapping_add(branch.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "projection parameter must be >= 2, got {k}"
        )));
    }
    Ok(())
}

// Branches run in parallel only when the work is worth the fork.
const PARALLEL_MIN: usize = 64;

/// The randomized recursive learner `A(S; T)`. `S` is split in order: the
/// first half feeds every recursive call, and `k + 1` subsamples of the rest
/// (without replacement) are added to `T`.
pub fn algorithm_a(
    class: &ConceptClass,
    s: &LabeledSample,
    t: &LabeledSample,
    k: usize,
    seed: u64,
) -> Result<usize> {
    check_k(k)?;
    s.validate(class)?;
    t.validate(class)?;
    algorithm_a_rec(class, s, t, k, seed)
}

fn algorithm_a_rec(
    class: &ConceptClass,
    s: &LabeledSample,
    t: &LabeledSample,
    k: usize,
    seed: u64,
) -> Result<usize> {
    if s.len() < 4 {
        return erm(class, &s.concat(t));
    }
    let half = s.len().div_ceil(2);
    let s0 = LabeledSample::new(s.entries()[..half].to_vec());
    let rest = &s.entries()[half..];
    let sub = s.len() / 4;
    let branch = |i: usize| -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let mut pool = rest.to_vec();
        let (picked, _) = pool.partial_shuffle(&mut rng, sub);
        let t_i = t.concat(&LabeledSample::new(picked.to_vec()));
        algorithm_a_rec(class, &s0, &t_i, k, rng.gen())
    };
    let hs: Vec<usize> = if s.len() >= PARALLEL_MIN {
        (0..=k).into_par_iter().map(branch).collect::<Result<_>>()?
    } else {
        (0..=k).map(branch).collect::<Result<_>>()?
    };
    project(class, &HypothesisMultiset { entries: hs }, k)
}

/// The deterministic recursive learner `A_ERM(S)`: split `S` into `k + 1`
/// contiguous parts, learn on each leave-one-part-out union, and project.
pub fn algorithm_a_erm(class: &ConceptClass, s: &LabeledSample, k: usize) -> Result<usize> {
    check_k(k)?;
    s.validate(class)?;
    algorithm_a_erm_rec(class, s.entries(), k, &mut ErmMemo::new())
}

/// Part boundaries: the first `k` parts have `floor(|S|/(k+1))` entries,
/// the last takes the remainder.
pub fn erm_split(len: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    let part = len / (k + 1);
    (0..=k)
        .map(|i| {
            let end = if i == k { len } else { (i + 1) * part };
            i * part..end
        })
        .collect()
}

// Subsamples recur across branches, so results are cached by sequence.
type ErmMemo = HashMap<Vec<(usize, Label)>, usize>;

fn algorithm_a_erm_rec(
    class: &ConceptClass,
    s: &[Example],
    k: usize,
    memo: &mut ErmMemo,
) -> Result<usize> {
    let key: Vec<(usize, Label)> = s.iter().map(|e| (e.point, e.label)).collect();
    if let Some(&h) = memo.get(&key) {
        return Ok(h);
    }
    let h = if s.len() < k + 1 {
        (0..class.len())
            .find(|&h| s.iter().all(|e| class.predict(h, e.point) == e.label))
            .ok_or(Error::Unrealizable)?
    } else {
        let parts = erm_split(s.len(), k);
        let mut hs = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let others: Vec<Example> = parts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, r)| s[r.clone()].iter().cloned())
                .collect();
            hs.push(algorithm_a_erm_rec(class, &others, k, memo)?);
        }
        project(class, &HypothesisMultiset { entries: hs }, k)?
    };
    memo.insert(key, h);
    Ok(h)
}

/// Everything a learner may look at in one training run. `target` exists
/// only so oracle controls can be expressed; real learners ignore it.
#[derive(Clone, Copy, Debug)]
pub struct TrainingRun<'a> {
    pub class: &'a ConceptClass,
    pub sample: &'a LabeledSample,
    pub seed: u64,
    pub target: usize,
}

pub trait Learner: Sync {
    fn name(&self) -> String;
    fn learn(&self, run: &TrainingRun<'_>) -> Result<usize>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Erm;

impl Learner for Erm {
    fn name(&self) -> String {
        "erm".into()
    }

    fn learn(&self, run: &TrainingRun<'_>) -> Result<usize> {
        erm(run.class, run.sample)
    }
}

/// `A(S; empty)`.
#[derive(Clone, Copy, Debug)]
pub struct AlgorithmA {
    pub k: usize,
}

impl Learner for AlgorithmA {
    fn name(&self) -> String {
        format!("A(k={})", self.k)
    }

    fn learn(&self, run: &TrainingRun<'_>) -> Result<usize> {
        algorithm_a(
            run.class,
            run.sample,
            &LabeledSample::empty(),
            self.k,
            run.seed,
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AlgorithmAErm {
    pub k: usize,
}

impl Learner for AlgorithmAErm {
    fn name(&self) -> String {
        format!("A_ERM(k={})", self.k)
    }

    fn learn(&self, run: &TrainingRun<'_>) -> Result<usize> {
        algorithm_a_erm(run.class, run.sample, self.k)
    }
}

/// Control learner that returns the target.
#[derive(Clone, Copy, Debug, Default)]
pub struct TargetOracle;

impl Learner for TargetOracle {
    fn name(&self) -> String {
        "target_oracle".into()
    }

    fn learn(&self, run: &TrainingRun<'_>) -> Result<usize> {
        Ok(run.target)
    }
}
