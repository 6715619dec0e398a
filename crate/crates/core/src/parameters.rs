//! Exhaustive computation of VC dimension, star number, hollow star number
//! and dual Helly number, plus certification of the projection property.
//!
//! Hypothesis sets are 64-bit masks, so classes are capped at 64
//! hypotheses. Every search enumerates labeled sets over distinct points
//! in ascending point order, plus the contradictory pairs
//! `{(x,+1),(x,-1)}`: a repeated entry with the same label makes some
//! neighbor contradictory, so larger multisets cannot be hollow stars.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::concept_class::{ConceptClass, Example, Label, Labeled, LabeledSample};
use crate::error::{Error, Result};
use crate::learners::{project, HypothesisMultiset};

/// Hard upper limit imposed by the mask representation.
pub const MAX_HYPOTHESES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_points: usize,
    pub max_hypotheses: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_points: 20,
            max_hypotheses: 64,
        }
    }
}

impl SearchCaps {
    pub fn with_points(max_points: usize) -> Self {
        SearchCaps {
            max_points,
            ..SearchCaps::default()
        }
    }
}

/// Per-point hypothesis masks: `masks[x][0]` holds the hypotheses labeling
/// `x` negative, `masks[x][1]` the positive ones.
struct Masks {
    masks: Vec<[u64; 2]>,
    all: u64,
}

impl Masks {
    fn new(class: &ConceptClass, caps: &SearchCaps) -> Result<Self> {
        if class.len() < 3 {
            return Err(Error::precondition(format!(
                "parameter search needs at least 3 hypotheses, class has {}",
                class.len()
            )));
        }
        let hyp_cap = caps.max_hypotheses.min(MAX_HYPOTHESES);
        if class.len() > hyp_cap {
            return Err(Error::CapExceeded {
                what: "hypotheses",
                actual: class.len(),
                cap: hyp_cap,
            });
        }
        if class.domain_size() > caps.max_points {
            return Err(Error::CapExceeded {
                what: "domain points",
                actual: class.domain_size(),
                cap: caps.max_points,
            });
        }
        let all = if class.len() == 64 {
            u64::MAX
        } else {
            (1u64 << class.len()) - 1
        };
        let masks = (0..class.domain_size())
            .map(|x| {
                let mut m = [0u64; 2];
                for h in 0..class.len() {
                    m[usize::from(class.predict(h, x).is_positive())] |= 1 << h;
                }
                m
            })
            .collect();
        Ok(Masks { masks, all })
    }

    #[inline]
    fn of(&self, x: usize, l: Label) -> u64 {
        self.masks[x][usize::from(l.is_positive())]
    }

    fn points(&self) -> usize {
        self.masks.len()
    }
}

const LABELS: [Label; 2] = [Label::Negative, Label::Positive];

/// VC dimension by growing shattered sets one point at a time; subsets of
/// shattered sets are shattered, so only shattered sets are extended.
pub fn vc_dimension(class: &ConceptClass, caps: &SearchCaps) -> Result<usize> {
    let masks = Masks::new(class, caps)?;
    let n = masks.points();
    let shattered = |set: &[usize]| -> bool {
        let patterns: HashSet<u64> = (0..class.len())
            .map(|h| {
                set.iter().enumerate().fold(0u64, |acc, (k, &x)| {
                    acc | (u64::from(class.predict(h, x).is_positive()) << k)
                })
            })
            .collect();
        patterns.len() == 1usize << set.len()
    };
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut dim = 0;
    loop {
        let mut next = Vec::new();
        for set in &level {
            let start = set.last().map_or(0, |&l| l + 1);
            for x in start..n {
                let mut grown = set.clone();
                grown.push(x);
                if grown.len() <= 63 && shattered(&grown) {
                    next.push(grown);
                }
            }
        }
        if next.is_empty() {
            return Ok(dim);
        }
        dim += 1;
        level = next;
    }
}

/// A hollow star set with, for each entry `i`, a hypothesis whose
/// disagreements with the set are exactly entry `i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HollowStar {
    pub entries: Vec<Example>,
    pub witnesses: Vec<usize>,
}

impl HollowStar {
    pub fn sample(&self) -> LabeledSample {
        LabeledSample::new(self.entries.clone())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Star number outcome; exceeding the cap is a value, not an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarNumber {
    Exact(usize),
    CapExceeded { cap: usize },
}

impl Serialize for StarNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StarNumber::Exact(v) => s.serialize_u64(*v as u64),
            StarNumber::CapExceeded { cap } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("cap_exceeded", cap)?;
                m.end()
            }
        }
    }
}

/// Walks the tree of star sets (realizable sets whose every neighbor is
/// realizable). Children that turn unrealizable while keeping every
/// neighbor realizable are hollow stars and end their branch.
struct StarWalk<'a> {
    masks: &'a Masks,
    depth_cap: Option<usize>,
    entries: Vec<(usize, Label)>,
    /// Realizers of each neighbor: hypotheses consistent with the set
    /// except exactly at that entry.
    realizers: Vec<u64>,
    best_star: usize,
    star_cap_hit: bool,
    best_hollow: Option<HollowStar>,
}

impl<'a> StarWalk<'a> {
    fn new(masks: &'a Masks, depth_cap: Option<usize>) -> Self {
        StarWalk {
            masks,
            depth_cap,
            entries: Vec::new(),
            realizers: Vec::new(),
            best_star: 0,
            star_cap_hit: false,
            best_hollow: None,
        }
    }

    fn record_hollow(&mut self, extra: (usize, Label), extra_realizers: u64, realizers: &[u64]) {
        let size = self.entries.len() + 1;
        if self.best_hollow.as_ref().is_some_and(|h| h.len() >= size) {
            return;
        }
        let mut entries: Vec<Example> = self
            .entries
            .iter()
            .map(|&(x, l)| Labeled::new(x, l))
            .collect();
        entries.push(Labeled::new(extra.0, extra.1));
        let mut witnesses: Vec<usize> = realizers
            .iter()
            .map(|m| m.trailing_zeros() as usize)
            .collect();
        witnesses.push(extra_realizers.trailing_zeros() as usize);
        self.best_hollow = Some(HollowStar { entries, witnesses });
    }

    fn walk(&mut self, start: usize, consistent: u64) {
        if self.star_cap_hit {
            return;
        }
        for x in start..self.masks.points() {
            for label in LABELS {
                let m = self.masks.of(x, label);
                let flipped = consistent & !m;
                if flipped == 0 {
                    continue;
                }
                let updated: Vec<u64> = self.realizers.iter().map(|r| r & m).collect();
                if updated.contains(&0) {
                    continue;
                }
                let next = consistent & m;
                if next == 0 {
                    self.record_hollow((x, label), flipped, &updated);
                    continue;
                }
                let size = self.entries.len() + 1;
                self.best_star = self.best_star.max(size);
                if let Some(cap) = self.depth_cap {
                    if size > cap {
                        self.star_cap_hit = true;
                        return;
                    }
                }
                let saved = std::mem::replace(&mut self.realizers, updated);
                self.realizers.push(flipped);
                self.entries.push((x, label));
                self.walk(x + 1, next);
                self.entries.pop();
                self.realizers = saved;
                if self.star_cap_hit {
                    return;
                }
            }
        }
    }
}

/// Largest realizable set whose every one-flip neighbor is realizable, or
/// `CapExceeded` once a star set larger than `cap` turns up.
pub fn star_number(class: &ConceptClass, caps: &SearchCaps, cap: usize) -> Result<StarNumber> {
    let masks = Masks::new(class, caps)?;
    let mut walk = StarWalk::new(&masks, Some(cap));
    walk.walk(0, masks.all);
    Ok(if walk.star_cap_hit {
        StarNumber::CapExceeded { cap }
    } else {
        StarNumber::Exact(walk.best_star)
    })
}

fn contradictory_pair(masks: &Masks) -> Option<HollowStar> {
    (0..masks.points()).find_map(|x| {
        let neg = masks.of(x, Label::Negative);
        let pos = masks.of(x, Label::Positive);
        (neg != 0 && pos != 0).then(|| HollowStar {
            entries: vec![
                Labeled::new(x, Label::Positive),
                Labeled::new(x, Label::Negative),
            ],
            witnesses: vec![neg.trailing_zeros() as usize, pos.trailing_zeros() as usize],
        })
    })
}

/// A hollow star of maximum size (first found in ascending point order),
/// or `None` when the class has no unrealizable set at all.
pub fn maximal_hollow_star(class: &ConceptClass, caps: &SearchCaps) -> Result<Option<HollowStar>> {
    let masks = Masks::new(class, caps)?;
    let mut walk = StarWalk::new(&masks, None);
    walk.walk(0, masks.all);
    let mut best = walk.best_hollow;
    if let Some(pair) = contradictory_pair(&masks) {
        if best.as_ref().is_none_or(|b| b.len() < 2) {
            best = Some(pair);
        }
    }
    Ok(best)
}

/// Size of the largest hollow star set; `0` when no set is unrealizable.
pub fn hollow_star_number(class: &ConceptClass, caps: &SearchCaps) -> Result<usize> {
    Ok(maximal_hollow_star(class, caps)?.map_or(0, |h| h.len()))
}

/// Enumerates inclusion-minimal unrealizable labeled sets. Branches are cut
/// once some entry `e` has no hypothesis consistent with the rest of the
/// set and wrong at `e`: no superset can then be minimal.
struct MinimalUnrealizable<'a> {
    masks: &'a Masks,
    entries: Vec<(usize, Label)>,
    best: usize,
    collect: Option<Vec<LabeledSample>>,
}

impl MinimalUnrealizable<'_> {
    /// AND of the masks of every entry except `skip`.
    fn leave_one_out(&self, set: &[(usize, Label)], skip: usize) -> u64 {
        set.iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .fold(self.masks.all, |acc, (_, &(x, l))| {
                acc & self.masks.of(x, l)
            })
    }

    fn found(&mut self, set: &[(usize, Label)]) {
        self.best = self.best.max(set.len());
        if let Some(out) = self.collect.as_mut() {
            out.push(set.iter().map(|&(x, l)| Labeled::new(x, l)).collect());
        }
    }

    fn search(&mut self, start: usize, consistent: u64) {
        for x in start..self.masks.points() {
            for label in LABELS {
                let mut set = self.entries.clone();
                set.push((x, label));
                let next = consistent & self.masks.of(x, label);
                if next == 0 {
                    let minimal = (0..set.len()).all(|i| self.leave_one_out(&set, i) != 0);
                    if minimal {
                        self.found(&set);
                    }
                    continue;
                }
                let extendable = (0..set.len()).all(|i| {
                    let (px, pl) = set[i];
                    self.leave_one_out(&set, i) & !self.masks.of(px, pl) != 0
                });
                if extendable {
                    self.entries.push((x, label));
                    self.search(x + 1, next);
                    self.entries.pop();
                }
            }
        }
    }
}

fn minimal_unrealizable_search(
    class: &ConceptClass,
    caps: &SearchCaps,
    collect: bool,
) -> Result<(usize, Vec<LabeledSample>)> {
    let masks = Masks::new(class, caps)?;
    let mut search = MinimalUnrealizable {
        masks: &masks,
        entries: Vec::new(),
        best: 0,
        collect: collect.then(Vec::new),
    };
    search.search(0, masks.all);
    for x in 0..masks.points() {
        if masks.of(x, Label::Negative) != 0 && masks.of(x, Label::Positive) != 0 {
            search.found(&[(x, Label::Positive), (x, Label::Negative)]);
        }
    }
    Ok((search.best, search.collect.unwrap_or_default()))
}

/// Largest inclusion-minimal unrealizable set; `0` when none exists.
pub fn dual_helly_number(class: &ConceptClass, caps: &SearchCaps) -> Result<usize> {
    Ok(minimal_unrealizable_search(class, caps, false)?.0)
}

/// Every inclusion-minimal unrealizable set (distinct points in ascending
/// order, then the contradictory pairs).
pub fn minimal_unrealizable_sets(
    class: &ConceptClass,
    caps: &SearchCaps,
) -> Result<Vec<LabeledSample>> {
    Ok(minimal_unrealizable_search(class, caps, true)?.1)
}

/// Direct check: unrealizable, and every one-flip neighbor realizable.
pub fn is_hollow_star(class: &ConceptClass, sample: &LabeledSample) -> Result<bool> {
    if sample.is_empty() || class.is_realizable(sample)? {
        return Ok(false);
    }
    for n in sample.neighbors()? {
        if !class.is_realizable(&n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProjectionVerdict {
    /// `witness` is a multiset with no hypothesis agreeing with its
    /// majority on the agreement region at `k`.
    Refuted {
        k: usize,
        witness: Vec<usize>,
        from_hollow_star: bool,
    },
    CertifiedUpToBudget {
        k: usize,
        multisets_tested: usize,
    },
}

impl ProjectionVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ProjectionVerdict::Refuted { .. })
    }
}

fn projects(class: &ConceptClass, multiset: &[usize], k: usize) -> Result<bool> {
    let m = HypothesisMultiset::new(class, multiset.to_vec())?;
    match project(class, &m, k) {
        Ok(_) => Ok(true),
        Err(Error::NoProjection { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Tries to refute the projection property at `k`: first with the witness
/// hypotheses of a maximal hollow star, then with `budget` seeded random
/// multisets of sizes `1..=3|H|`.
pub fn projection_check(
    class: &ConceptClass,
    k: usize,
    budget: usize,
    seed: u64,
    caps: &SearchCaps,
) -> Result<ProjectionVerdict> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "projection check needs k >= 2, got {k}"
        )));
    }
    let star = maximal_hollow_star(class, caps)?;
    if let Some(star) = star.filter(|s| k < s.len()) {
        if !projects(class, &star.witnesses, k)? {
            return Ok(ProjectionVerdict::Refuted {
                k,
                witness: star.witnesses,
                from_hollow_star: true,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_size = 3 * class.len();
    for _ in 0..budget {
        let size = rng.gen_range(1..=max_size);
        let multiset: Vec<usize> = (0..size).map(|_| rng.gen_range(0..class.len())).collect();
        if !projects(class, &multiset, k)? {
            return Ok(ProjectionVerdict::Refuted {
                k,
                witness: multiset,
                from_hollow_star: false,
            });
        }
    }
    Ok(ProjectionVerdict::CertifiedUpToBudget {
        k,
        multisets_tested: budget,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionStatus {
    /// `max(k_w, 2)` when no tested multiset refuted it.
    pub certified_k: Option<usize>,
    pub multisets_tested: usize,
    /// Hollow-star witness multiset refuting `k_o - 1` (present when `k_o >= 3`).
    pub refuted_below: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterReport {
    pub points: usize,
    pub hypotheses: usize,
    pub vc: usize,
    pub star: StarNumber,
    pub hollow_star: usize,
    pub dual_helly: usize,
    /// Set when the class has no unrealizable set, so both numbers are 0 by
    /// convention rather than by definition.
    pub no_unrealizable_sets: bool,
    pub hollow_star_set: Option<HollowStar>,
    pub projection: ProjectionStatus,
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub caps: SearchCaps,
    pub star_cap: usize,
    pub projection_budget: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            caps: SearchCaps::default(),
            star_cap: 12,
            projection_budget: 200,
            seed: 0,
        }
    }
}

impl ParameterReport {
    /// The projection parameter the learners use on finite classes.
    pub fn projection_parameter(&self) -> usize {
        self.dual_helly.max(2)
    }
}

pub fn parameter_report(class: &ConceptClass, opts: &ReportOptions) -> Result<ParameterReport> {
    let caps = &opts.caps;
    let vc = vc_dimension(class, caps)?;
    let star = star_number(class, caps, opts.star_cap)?;
    let hollow = maximal_hollow_star(class, caps)?;
    let hollow_star = hollow.as_ref().map_or(0, HollowStar::len);
    let dual_helly = dual_helly_number(class, caps)?;
    let k = dual_helly.max(2);
    let verdict = projection_check(class, k, opts.projection_budget, opts.seed, caps)?;
    let refuted_below = if hollow_star >= 3 {
        match projection_check(class, hollow_star - 1, 0, opts.seed, caps)? {
            ProjectionVerdict::Refuted { witness, .. } => Some(witness),
            ProjectionVerdict::CertifiedUpToBudget { .. } => None,
        }
    } else {
        None
    };
    Ok(ParameterReport {
        points: class.domain_size(),
        hypotheses: class.len(),
        vc,
        star,
        hollow_star,
        dual_helly,
        no_unrealizable_sets: hollow.is_none(),
        hollow_star_set: hollow,
        projection: ProjectionStatus {
            certified_k: (!verdict.is_refuted()).then_some(k),
            multisets_tested: opts.projection_budget,
            refuted_below,
        },
    })
}
