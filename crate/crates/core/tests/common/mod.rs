//! Independent oracles for integration tests. Nothing here calls the search
//! routines under test; every quantity is recomputed from its definition.

#![allow(dead_code)]

use hellylab::concept_class::{ConceptClass, DomainPoint, Label};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Every labeled set over distinct points as `(points, labels)` with labels
/// packed into a bitmask (bit set means positive).
pub fn labeled_sets(n: usize) -> Vec<(Vec<usize>, u32)> {
    let mut out = Vec::new();
    for subset in 0u32..(1 << n) {
        let pts: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
        for labels in 0u32..(1 << pts.len()) {
            out.push((pts.clone(), labels));
        }
    }
    out
}

fn label_of(labels: u32, i: usize) -> Label {
    Label::from_bool(labels >> i & 1 == 1)
}

pub fn realizable(class: &ConceptClass, pts: &[usize], labels: u32) -> bool {
    (0..class.len()).any(|h| {
        pts.iter()
            .enumerate()
            .all(|(i, &x)| class.predict(h, x) == label_of(labels, i))
    })
}

fn flip(labels: u32, i: usize) -> u32 {
    labels ^ (1 << i)
}

pub fn naive_vc(class: &ConceptClass) -> usize {
    labeled_sets(class.domain_size())
        .into_iter()
        .filter(|(pts, labels)| {
            *labels == 0 && { (0u32..(1 << pts.len())).all(|l| realizable(class, pts, l)) }
        })
        .map(|(pts, _)| pts.len())
        .max()
        .unwrap_or(0)
}

pub fn naive_star(class: &ConceptClass) -> usize {
    labeled_sets(class.domain_size())
        .into_iter()
        .filter(|(pts, labels)| {
            realizable(class, pts, *labels)
                && (0..pts.len()).all(|i| realizable(class, pts, flip(*labels, i)))
        })
        .map(|(pts, _)| pts.len())
        .max()
        .unwrap_or(0)
}

/// Does some point carry both labels across the class?
fn has_varying_point(class: &ConceptClass) -> bool {
    (0..class.domain_size())
        .any(|x| (1..class.len()).any(|h| class.predict(h, x) != class.predict(0, x)))
}

/// Largest hollow star; contradictory pairs add size 2 when some point varies.
pub fn naive_hollow_star(class: &ConceptClass) -> usize {
    let best = labeled_sets(class.domain_size())
        .into_iter()
        .filter(|(pts, labels)| {
            !pts.is_empty()
                && !realizable(class, pts, *labels)
                && (0..pts.len()).all(|i| realizable(class, pts, flip(*labels, i)))
        })
        .map(|(pts, _)| pts.len())
        .max()
        .unwrap_or(0);
    if has_varying_point(class) {
        best.max(2)
    } else {
        best
    }
}

/// Largest unrealizable set all of whose proper subsets are realizable.
pub fn naive_dual_helly(class: &ConceptClass) -> usize {
    let best = labeled_sets(class.domain_size())
        .into_iter()
        .filter(|(pts, labels)| {
            if pts.is_empty() || realizable(class, pts, *labels) {
                return false;
            }
            (0..pts.len()).all(|skip| {
                let rest: Vec<usize> = (0..pts.len()).filter(|&i| i != skip).collect();
                let sub_pts: Vec<usize> = rest.iter().map(|&i| pts[i]).collect();
                let sub_labels = rest
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (k, &i)| acc | ((labels >> i & 1) << k));
                realizable(class, &sub_pts, sub_labels)
            })
        })
        .map(|(pts, _)| pts.len())
        .max()
        .unwrap_or(0);
    if has_varying_point(class) {
        best.max(2)
    } else {
        best
    }
}

/// A class with distinct random rows; `None` if too few distinct rows exist.
pub fn random_class(rng: &mut impl Rng, points: usize, hypotheses: usize) -> Option<ConceptClass> {
    if hypotheses > 1 << points {
        return None;
    }
    let mut rows: Vec<Vec<Label>> = Vec::new();
    while rows.len() < hypotheses {
        let row: Vec<Label> = (0..points)
            .map(|_| Label::from_bool(rng.gen_bool(0.5)))
            .collect();
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    let domain = (0..points)
        .map(|i| DomainPoint::named(format!("x{i}")))
        .collect();
    ConceptClass::new(domain, rows).ok()
}

/// The same class with domain points and hypotheses reordered.
pub fn permuted(class: &ConceptClass, point_perm: &[usize], hyp_perm: &[usize]) -> ConceptClass {
    let domain = point_perm
        .iter()
        .map(|&p| class.domain()[p].clone())
        .collect();
    let rows = hyp_perm
        .iter()
        .map(|&h| point_perm.iter().map(|&p| class.predict(h, p)).collect())
        .collect();
    ConceptClass::new(domain, rows).unwrap()
}

/// Maximum margin by enumerating active sets and solving the primal KKT
/// system `w = sum a_i y_i x_i`, `sum a_i y_i = 0`, `y_i (<w, x_i> - b) = 1`
/// on each, keeping primal-feasible solutions. Returns `(w, b, margin)`.
pub fn brute_force_svm(points: &[Vec<f64>], labels: &[Label]) -> Option<(Vec<f64>, f64, f64)> {
    let n = points[0].len();
    let m = points.len();
    let y: Vec<f64> = labels.iter().map(|l| f64::from(l.as_i8())).collect();
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for mask in 1u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if !active.iter().any(|&i| y[i] > 0.0) || !active.iter().any(|&i| y[i] < 0.0) {
            continue;
        }
        let a = active.len();
        let size = n + 1 + a;
        let mut mat = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        // w - sum a_i y_i x_i = 0
        for r in 0..n {
            mat[(r, r)] = 1.0;
            for (k, &i) in active.iter().enumerate() {
                mat[(r, n + 1 + k)] = -y[i] * points[i][r];
            }
        }
        // sum a_i y_i = 0
        for (k, &i) in active.iter().enumerate() {
            mat[(n, n + 1 + k)] = y[i];
        }
        // y_i (<w, x_i> - b) = 1
        for (k, &i) in active.iter().enumerate() {
            let row = n + 1 + k;
            for c in 0..n {
                mat[(row, c)] = y[i] * points[i][c];
            }
            mat[(row, n)] = -y[i];
            rhs[row] = 1.0;
        }
        let svd = mat.clone().svd(true, true);
        let Ok(sol) = svd.solve(&rhs, 1e-12) else {
            continue;
        };
        if (&mat * &sol - &rhs).norm() > 1e-9 {
            continue;
        }
        let w: Vec<f64> = (0..n).map(|r| sol[r]).collect();
        let b = sol[n];
        let feasible = (0..m).all(|i| {
            let f: f64 = w.iter().zip(&points[i]).map(|(a, c)| a * c).sum::<f64>() - b;
            y[i] * f >= 1.0 - 1e-9
        });
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !feasible || norm == 0.0 {
            continue;
        }
        let margin = 1.0 / norm;
        if best.as_ref().is_none_or(|(_, _, g)| margin > *g) {
            best = Some((w.iter().map(|v| v / norm).collect(), b / norm, margin));
        }
    }
    best
}

/// Random labeled points in `[-1, 1]^dim` split by a random hyperplane with
/// every point at least `gap` away from it; both labels present.
pub fn random_separable(
    rng: &mut impl Rng,
    count: usize,
    dim: usize,
    gap: f64,
) -> (Vec<Vec<f64>>, Vec<Label>) {
    loop {
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        let b = rng.gen_range(-0.3..0.3);
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        let mut attempts = 0;
        while pts.len() < count && attempts < 10_000 {
            attempts += 1;
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = (w.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() - b) / norm;
            if s.abs() >= gap {
                labels.push(Label::from_sign(s));
                pts.push(x);
            }
        }
        let both = labels.contains(&Label::Positive) && labels.contains(&Label::Negative);
        if pts.len() == count && both {
            return (pts, labels);
        }
    }
}
