use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConceptClass, DomainPoint, Label};
use crate::error::{Error, Result};
use crate::svm;

/// The named class families the laboratory can generate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassFamily {
    /// `h_t(x) = +1` iff `x = t` over points `1..=n`; optionally with the
    /// all-negative limit classifier appended.
    Singletons {
        n: usize,
        augment_all_negative: bool,
    },
    /// `h_t(x) = +1` iff `x >= t` for every grid value `t`.
    Thresholds {
        grid: Vec<f64>,
        augment_all_negative: bool,
    },
    /// Closed intervals `[a, b]` with endpoints on the grid.
    Intervals { grid: Vec<f64>, include_empty: bool },
    /// The lower-bound class with VC dimension `d` and dual Helly number `k_w`.
    Hard { d: usize, k_w: usize },
    /// Every labeling of the points realizable by a halfspace with closed
    /// positive side.
    HalfspaceDichotomies { points: Vec<Vec<f64>> },
    /// Distinct uniformly random rows.
    Random {
        points: usize,
        hypotheses: usize,
        seed: u64,
    },
}

pub fn generate_class(family: &ClassFamily) -> Result<ConceptClass> {
    match family {
        ClassFamily::Singletons {
            n,
            augment_all_negative,
        } => singletons(*n, *augment_all_negative),
        ClassFamily::Thresholds {
            grid,
            augment_all_negative,
        } => thresholds(grid, *augment_all_negative),
        ClassFamily::Intervals {
            grid,
            include_empty,
        } => intervals(grid, *include_empty),
        ClassFamily::Hard { d, k_w } => hard(*d, *k_w),
        ClassFamily::HalfspaceDichotomies { points } => halfspace_dichotomies(points),
        ClassFamily::Random {
            points,
            hypotheses,
            seed,
        } => random(*points, *hypotheses, *seed),
    }
}

fn singletons(n: usize, augment: bool) -> Result<ConceptClass> {
    if n == 0 {
        return Err(Error::invalid("singletons need n >= 1"));
    }
    let domain = (1..=n).map(|i| DomainPoint::named(i.to_string())).collect();
    let mut rows: Vec<Vec<Label>> = (0..n)
        .map(|t| (0..n).map(|x| Label::from_bool(x == t)).collect())
        .collect();
    if augment {
        rows.push(vec![Label::Negative; n]);
    }
    ConceptClass::new(domain, rows)
}

fn grid_domain(grid: &[f64]) -> Result<Vec<DomainPoint>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid must contain at least one point"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    let mut seen = HashSet::new();
    for v in grid {
        if !seen.insert(v.to_bits()) {
            return Err(Error::invalid(format!("duplicate grid point {v}")));
        }
    }
    Ok(grid
        .iter()
        .map(|&v| DomainPoint::with_coords(format!("{v}"), vec![v]))
        .collect())
}

fn sorted_values(grid: &[f64]) -> Vec<f64> {
    let mut v = grid.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn thresholds(grid: &[f64], augment: bool) -> Result<ConceptClass> {
    let domain = grid_domain(grid)?;
    let mut rows: Vec<Vec<Label>> = sorted_values(grid)
        .into_iter()
        .map(|t| grid.iter().map(|&x| Label::from_bool(x >= t)).collect())
        .collect();
    if augment {
        rows.push(vec![Label::Negative; grid.len()]);
    }
    ConceptClass::new(domain, rows)
}

fn intervals(grid: &[f64], include_empty: bool) -> Result<ConceptClass> {
    let domain = grid_domain(grid)?;
    let values = sorted_values(grid);
    let mut rows = Vec::new();
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i..] {
            rows.push(
                grid.iter()
                    .map(|&x| Label::from_bool(a <= x && x <= b))
                    .collect(),
            );
        }
    }
    if include_empty {
        rows.push(vec![Label::Negative; grid.len()]);
    }
    ConceptClass::new(domain, rows)
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - left {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        rec(0, n, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

fn hard(d: usize, k_w: usize) -> Result<ConceptClass> {
    if d == 0 {
        return Err(Error::invalid("hard class needs d >= 1"));
    }
    if k_w < 2 {
        return Err(Error::invalid("hard class needs k_w >= 2"));
    }
    if d == 1 {
        // The grouped construction collapses for d = 1; singletons over k_w
        // points have VC dimension 1 and dual Helly number k_w.
        return singletons(k_w, false);
    }
    if k_w < d + 1 {
        return Err(Error::invalid(format!(
            "hard class with d = {d} needs k_w >= d + 1 = {}",
            d + 1
        )));
    }
    let groups = (d - 1)..=(k_w + d - 2);
    let mut domain = Vec::new();
    for i in groups.clone() {
        for j in 1..=i {
            domain.push(DomainPoint::with_coords(
                format!("({i},{j})"),
                vec![i as f64, j as f64],
            ));
        }
    }
    let mut rows = Vec::new();
    for i in groups {
        for combo in combinations(i, d - 1) {
            let chosen: HashSet<usize> = combo.iter().map(|j| j + 1).collect();
            rows.push(hard_row(&domain, i, &chosen));
        }
    }
    ConceptClass::new(domain, rows)
}

fn hard_row(domain: &[DomainPoint], i: usize, chosen: &HashSet<usize>) -> Vec<Label> {
    domain
        .iter()
        .map(|p| {
            let c = p.coords.as_ref().expect("hard class points carry coords");
            let (pi, pj) = (c[0] as usize, c[1] as usize);
            Label::from_bool(pi != i || chosen.contains(&pj))
        })
        .collect()
}

/// Index of `h_{i,J}` in a class produced by `ClassFamily::Hard` with
/// `d >= 2`; `chosen` holds 1-based second coordinates.
pub fn hard_class_index(class: &ConceptClass, i: usize, chosen: &[usize]) -> Option<usize> {
    let set: HashSet<usize> = chosen.iter().copied().collect();
    class.find_row(&hard_row(class.domain(), i, &set))
}

fn halfspace_dichotomies(points: &[Vec<f64>]) -> Result<ConceptClass> {
    if points.is_empty() {
        return Err(Error::invalid(
            "halfspace dichotomies need at least one point",
        ));
    }
    if points.len() > 24 {
        return Err(Error::CapExceeded {
            what: "points for dichotomy enumeration",
            actual: points.len(),
            cap: 24,
        });
    }
    let mut seen = HashSet::new();
    for p in points {
        let key: Vec<u64> = p.iter().map(|v| v.to_bits()).collect();
        if !seen.insert(key) {
            return Err(Error::invalid(format!("duplicate point {p:?}")));
        }
    }
    let domain: Vec<DomainPoint> = points
        .iter()
        .enumerate()
        .map(|(i, p)| DomainPoint::with_coords(format!("p{i}"), p.clone()))
        .collect();
    // Validates arity through the coords invariant before any solve.
    ConceptClass::new(domain.clone(), Vec::new())?;
    let n = points.len();
    let mut rows = Vec::new();
    // Enumerate so that the all-positive labeling comes first.
    for mask in 0u64..(1u64 << n) {
        let labels: Vec<Label> = (0..n)
            .map(|x| Label::from_bool(mask >> x & 1 == 0))
            .collect();
        if svm::separable(points, &labels)? {
            rows.push(labels);
        }
    }
    ConceptClass::new(domain, rows)
}

fn random(points: usize, hypotheses: usize, seed: u64) -> Result<ConceptClass> {
    if points == 0 || hypotheses == 0 {
        return Err(Error::invalid(
            "random class needs at least one point and one hypothesis",
        ));
    }
    if points < 64 && hypotheses as u128 > 1u128 << points {
        return Err(Error::invalid(format!(
            "cannot draw {hypotheses} distinct rows over {points} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = (0..points)
        .map(|i| DomainPoint::named(format!("x{i}")))
        .collect();
    let rows: Vec<Vec<Label>> = if points <= 20 {
        index::sample(&mut rng, 1usize << points, hypotheses)
            .into_iter()
            .map(|code| {
                (0..points)
                    .map(|x| Label::from_bool(code >> x & 1 == 1))
                    .collect()
            })
            .collect()
    } else {
        let mut seen = HashSet::new();
        let mut rows = Vec::new();
        while rows.len() < hypotheses {
            let row: Vec<Label> = (0..points).map(|_| Label::from_bool(rng.gen())).collect();
            if seen.insert(row.clone()) {
                rows.push(row);
            }
        }
        rows
    };
    ConceptClass::new(domain, rows)
}
