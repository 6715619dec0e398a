//! Hard-margin support vector machine for separable samples in `R^n`.
//!
//! The solver works on the equivalent closest-pair-of-convex-hulls problem:
//! the maximum-margin hyperplane bisects the shortest segment between the
//! hull of the positive points and the hull of the negative points. A
//! pairwise mass-transfer iteration (Mitchell-Dem'yanov-Malozemov) drives
//! the duality gap down, then the active set is polished with an exact
//! KKT solve.

mod scheme;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::concept_class::Label;
use crate::error::{Error, Result};

pub use scheme::SvmScheme;

pub const SEPARABILITY_TOL: f64 = 1e-9;
pub const MARGIN_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmOptions {
    /// Minimum normalized margin for a sample to count as separable.
    pub separability_tol: f64,
    /// Relative slack for support-point membership.
    pub margin_tol: f64,
    pub max_iterations: usize,
    /// Stop once the duality gap falls below this fraction of `scale^2`.
    pub gap_tol: f64,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            separability_tol: SEPARABILITY_TOL,
            margin_tol: MARGIN_TOL,
            max_iterations: 200_000,
            gap_tol: 1e-10,
        }
    }
}

/// `x -> sign(<w, x> - v)` with `sign(0) = +1`.
///
/// A threshold of `-inf` (`+inf`) encodes the constant `+1` (`-1`)
/// classifier used for single-class samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub weights: Vec<f64>,
    pub threshold: f64,
}

impl Halfspace {
    pub fn new(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::invalid("halfspace weights must not all be zero"));
        }
        Ok(Halfspace { weights, threshold })
    }

    pub fn constant(dim: usize, label: Label) -> Self {
        let mut weights = vec![0.0; dim.max(1)];
        weights[0] = 1.0;
        let threshold = match label {
            Label::Positive => f64::NEG_INFINITY,
            Label::Negative => f64::INFINITY,
        };
        Halfspace { weights, threshold }
    }

    pub fn is_constant(&self) -> bool {
        self.threshold.is_infinite()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) - self.threshold
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from_sign(self.score(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmSolution {
    /// Unit-norm weights and the bisecting threshold.
    pub hypothesis: Halfspace,
    /// Geometric margin; infinite for single-class samples.
    pub margin: f64,
    /// Sample indices (all duplicates included) lying on the margin.
    pub support_indices: Vec<usize>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Distinct points with their first sample index and label.
struct Collapsed {
    points: Vec<Vec<f64>>,
    labels: Vec<Label>,
    /// For each distinct point, every sample index carrying it.
    members: Vec<Vec<usize>>,
}

fn collapse(points: &[Vec<f64>], labels: &[Label]) -> Result<std::result::Result<Collapsed, ()>> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one point"));
    }
    if points.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    let dim = points[0].len();
    if dim == 0 {
        return Err(Error::invalid("points must have at least one coordinate"));
    }
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut out = Collapsed {
        points: Vec::new(),
        labels: Vec::new(),
        members: Vec::new(),
    };
    for (i, (p, &l)) in points.iter().zip(labels).enumerate() {
        if p.len() != dim {
            return Err(Error::invalid(format!(
                "point {i} has arity {}, expected {dim}",
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "point {i} has non-finite coordinates"
            )));
        }
        // -0.0 and 0.0 are the same point
        let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
        match index.get(&key) {
            Some(&u) => {
                if out.labels[u] != l {
                    return Ok(Err(()));
                }
                out.members[u].push(i);
            }
            None => {
                index.insert(key, out.points.len());
                out.points.push(p.clone());
                out.labels.push(l);
                out.members.push(vec![i]);
            }
        }
    }
    Ok(Ok(out))
}

/// Result of the hull-distance iteration on centered points.
struct HullGap {
    z: Vec<f64>,
    pos_weights: Vec<f64>,
    neg_weights: Vec<f64>,
}

/// Pairwise mass transfer on `min ||sum a_i p_i - sum b_j q_j||` over the
/// product of simplices. `stop_when_separated` lets the separability
/// oracle return as soon as a positive margin is certified.
fn hull_gap(
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
    scale: f64,
    opts: &SvmOptions,
    stop_when_separated: bool,
) -> HullGap {
    let dim = pos[0].len();
    let mut a = vec![0.0; pos.len()];
    let mut b = vec![0.0; neg.len()];
    a[0] = 1.0;
    b[0] = 1.0;
    let rebuild = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; dim];
        for (w, p) in a.iter().zip(pos) {
            if *w != 0.0 {
                for k in 0..dim {
                    z[k] += w * p[k];
                }
            }
        }
        for (w, q) in b.iter().zip(neg) {
            if *w != 0.0 {
                for k in 0..dim {
                    z[k] -= w * q[k];
                }
            }
        }
        z
    };
    let mut z = rebuild(&a, &b);
    let gap_tol = opts.gap_tol * scale * scale;
    let sep_tol = opts.separability_tol * scale;
    for iter in 0..opts.max_iterations {
        if iter % 64 == 63 {
            z = rebuild(&a, &b);
        }
        let zz = dot(&z, &z);
        // positive side: move mass from the worst active point to the best
        let (mut lo_p, mut lo_s) = (0, f64::INFINITY);
        let (mut hi_p, mut hi_s) = (usize::MAX, f64::NEG_INFINITY);
        let mut zp = 0.0;
        for (i, p) in pos.iter().enumerate() {
            let s = dot(&z, p);
            if s < lo_s {
                lo_s = s;
                lo_p = i;
            }
            if a[i] > 0.0 {
                zp += a[i] * s;
                if s > hi_s {
                    hi_s = s;
                    hi_p = i;
                }
            }
        }
        let (mut hi_n, mut hi_t) = (0, f64::NEG_INFINITY);
        let (mut lo_n, mut lo_t) = (usize::MAX, f64::INFINITY);
        let mut zq = 0.0;
        for (j, q) in neg.iter().enumerate() {
            let t = dot(&z, q);
            if t > hi_t {
                hi_t = t;
                hi_n = j;
            }
            if b[j] > 0.0 {
                zq += b[j] * t;
                if t < lo_t {
                    lo_t = t;
                    lo_n = j;
                }
            }
        }
        let znorm = zz.sqrt();
        if znorm <= sep_tol * 1e-3 {
            break;
        }
        let gap = (zp - lo_s) + (hi_t - zq);
        if gap <= gap_tol {
            break;
        }
        if stop_when_separated {
            let lower = (lo_s - hi_t) / znorm;
            if lower / 2.0 >= sep_tol {
                break;
            }
            // hulls overlap once the margin can no longer exceed the tolerance
            if znorm / 2.0 < sep_tol {
                break;
            }
        }
        let dp = hi_s - lo_s;
        let dn = hi_t - lo_t;
        if dp >= dn {
            let d: Vec<f64> = (0..dim).map(|k| pos[lo_p][k] - pos[hi_p][k]).collect();
            let dd = dot(&d, &d);
            if dd == 0.0 {
                break;
            }
            let t = (dp / dd).min(a[hi_p]);
            a[hi_p] -= t;
            a[lo_p] += t;
            if a[hi_p] < 1e-300 {
                a[hi_p] = 0.0;
            }
            for k in 0..dim {
                z[k] += t * d[k];
            }
        } else {
            let d: Vec<f64> = (0..dim).map(|k| neg[hi_n][k] - neg[lo_n][k]).collect();
            let dd = dot(&d, &d);
            if dd == 0.0 {
                break;
            }
            let t = (dn / dd).min(b[lo_n]);
            b[lo_n] -= t;
            b[hi_n] += t;
            if b[lo_n] < 1e-300 {
                b[lo_n] = 0.0;
            }
            for k in 0..dim {
                z[k] -= t * d[k];
            }
        }
    }
    HullGap {
        z: rebuild(&a, &b),
        pos_weights: a,
        neg_weights: b,
    }
}

/// Bisecting threshold and margin of direction `u` over labeled points.
fn margin_along(u: &[f64], points: &[Vec<f64>], labels: &[Label]) -> (f64, f64) {
    let mut min_pos = f64::INFINITY;
    let mut max_neg = f64::NEG_INFINITY;
    for (p, l) in points.iter().zip(labels) {
        let s = dot(u, p);
        if l.is_positive() {
            min_pos = min_pos.min(s);
        } else {
            max_neg = max_neg.max(s);
        }
    }
    ((min_pos + max_neg) / 2.0, (min_pos - max_neg) / 2.0)
}

/// Minimum-norm `w` with `y_i (<w, x_i> - v) = 1` on `active`, via the
/// reduced KKT system in the multipliers.
fn equality_direction(points: &[Vec<f64>], labels: &[Label], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    if k < 2 {
        return None;
    }
    let y = |i: usize| f64::from(labels[i].as_i8());
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            m[(r, c)] = y(i) * y(j) * dot(&points[i], &points[j]);
        }
        m[(r, k)] = -y(i);
        m[(k, r)] = y(i);
        rhs[r] = 1.0;
    }
    let svd = m.clone().svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    let resid = (&m * &sol - &rhs).amax();
    if !resid.is_finite() || resid > 1e-6 {
        return None;
    }
    let dim = points[0].len();
    let mut w = vec![0.0; dim];
    for (r, &i) in active.iter().enumerate() {
        for d in 0..dim {
            w[d] += sol[r] * y(i) * points[i][d];
        }
    }
    let n = norm(&w);
    if !n.is_finite() || n == 0.0 {
        return None;
    }
    Some(w.into_iter().map(|v| v / n).collect())
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    let first = &points[0];
    let s = points
        .iter()
        .flat_map(|p| p.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

enum Solved {
    SingleClass(Label),
    Separated { u: Vec<f64>, v: f64, margin: f64 },
    Overlapping,
}

fn solve_collapsed(c: &Collapsed, opts: &SvmOptions, only_separability: bool) -> Solved {
    let dim = c.points[0].len();
    if c.labels.iter().all(|&l| l == c.labels[0]) {
        return Solved::SingleClass(c.labels[0]);
    }
    let scale = scale_of(&c.points);
    let n = c.points.len() as f64;
    let center: Vec<f64> = (0..dim)
        .map(|k| c.points.iter().map(|p| p[k]).sum::<f64>() / n)
        .collect();
    let centered: Vec<Vec<f64>> = c
        .points
        .iter()
        .map(|p| p.iter().zip(&center).map(|(a, b)| a - b).collect())
        .collect();
    let pos_idx: Vec<usize> = (0..c.labels.len())
        .filter(|&i| c.labels[i].is_positive())
        .collect();
    let neg_idx: Vec<usize> = (0..c.labels.len())
        .filter(|&i| !c.labels[i].is_positive())
        .collect();
    let pos: Vec<Vec<f64>> = pos_idx.iter().map(|&i| centered[i].clone()).collect();
    let neg: Vec<Vec<f64>> = neg_idx.iter().map(|&i| centered[i].clone()).collect();
    let gap = hull_gap(&pos, &neg, scale, opts, only_separability);
    let zn = norm(&gap.z);
    let sep_tol = opts.separability_tol * scale;
    if zn / 2.0 < sep_tol {
        return Solved::Overlapping;
    }
    let mut best_u: Vec<f64> = gap.z.iter().map(|v| v / zn).collect();
    let (mut best_v, mut best_margin) = margin_along(&best_u, &centered, &c.labels);
    if !only_separability && best_margin > 0.0 {
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        let weighted: Vec<usize> = pos_idx
            .iter()
            .zip(&gap.pos_weights)
            .chain(neg_idx.iter().zip(&gap.neg_weights))
            .filter(|(_, &w)| w > 1e-12)
            .map(|(&i, _)| i)
            .collect();
        for slack in [1e-9, 1e-7, 1e-5] {
            let near: Vec<usize> = (0..centered.len())
                .filter(|&i| {
                    let s = f64::from(c.labels[i].as_i8()) * (dot(&best_u, &centered[i]) - best_v);
                    s <= best_margin + slack * scale
                })
                .collect();
            candidates.push(near);
        }
        candidates.push(weighted);
        for active in candidates {
            if let Some(u) = equality_direction(&centered, &c.labels, &active) {
                let (v, m) = margin_along(&u, &centered, &c.labels);
                if m > best_margin {
                    best_u = u;
                    best_v = v;
                    best_margin = m;
                }
            }
        }
    }
    if best_margin < sep_tol {
        return Solved::Overlapping;
    }
    let v = best_v + dot(&best_u, &center);
    Solved::Separated {
        u: best_u,
        v,
        margin: best_margin,
    }
}

/// Whether a hyperplane separates the labels with normalized margin at
/// least the separability tolerance.
pub fn separable(points: &[Vec<f64>], labels: &[Label]) -> Result<bool> {
    separable_with(points, labels, &SvmOptions::default())
}

pub fn separable_with(points: &[Vec<f64>], labels: &[Label], opts: &SvmOptions) -> Result<bool> {
    let c = match collapse(points, labels)? {
        Ok(c) => c,
        Err(()) => return Ok(false),
    };
    Ok(!matches!(
        solve_collapsed(&c, opts, true),
        Solved::Overlapping
    ))
}

/// The maximum-margin separator of a separable sample.
pub fn hard_margin_svm(points: &[Vec<f64>], labels: &[Label]) -> Result<SvmSolution> {
    hard_margin_svm_with(points, labels, &SvmOptions::default())
}

pub fn hard_margin_svm_with(
    points: &[Vec<f64>],
    labels: &[Label],
    opts: &SvmOptions,
) -> Result<SvmSolution> {
    let c = collapse(points, labels)?.map_err(|()| Error::NotSeparable)?;
    let dim = c.points[0].len();
    match solve_collapsed(&c, opts, false) {
        Solved::Overlapping => Err(Error::NotSeparable),
        Solved::SingleClass(l) => Ok(SvmSolution {
            hypothesis: Halfspace::constant(dim, l),
            margin: f64::INFINITY,
            support_indices: Vec::new(),
        }),
        Solved::Separated { u, v, margin } => {
            let mut support = Vec::new();
            for (k, p) in c.points.iter().enumerate() {
                let s = f64::from(c.labels[k].as_i8()) * (dot(&u, p) - v);
                if s <= margin * (1.0 + opts.margin_tol) {
                    support.extend_from_slice(&c.members[k]);
                }
            }
            support.sort_unstable();
            Ok(SvmSolution {
                hypothesis: Halfspace {
                    weights: u,
                    threshold: v,
                },
                margin,
                support_indices: support,
            })
        }
    }
}
