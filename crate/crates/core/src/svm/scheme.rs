use std::cmp::Ordering;

use super::{hard_margin_svm_with, Halfspace, SvmOptions, SvmSolution};
use crate::compression::{CompressionScheme, Predictor};
use crate::concept_class::{families::combinations, Label, Labeled};
use crate::error::{Error, Result};

impl Predictor<Vec<f64>> for Halfspace {
    fn predict(&self, x: &Vec<f64>) -> Label {
        Halfspace::predict(self, x)
    }
}

/// Stable compression scheme of size `n + 1` for halfspaces in `R^n`.
///
/// `kappa` keeps the smallest subset of support points (first occurrences,
/// lexicographic by sample position on ties) whose own maximum-margin
/// solution equals the full one; `rho` is the hard-margin SVM again.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmScheme {
    pub dim: usize,
    pub opts: SvmOptions,
    /// Largest support set searched exhaustively.
    pub max_support: usize,
}

/// Solutions closer than this (weights, threshold relative to scale, margin
/// relative) count as the same hyperplane.
const SAME_SOLUTION_TOL: f64 = 1e-6;

impl SvmScheme {
    pub fn new(dim: usize) -> Self {
        SvmScheme {
            dim,
            opts: SvmOptions::default(),
            max_support: 16,
        }
    }

    fn solve(&self, sample: &[&Labeled<Vec<f64>>]) -> Result<SvmSolution> {
        let points: Vec<Vec<f64>> = sample.iter().map(|e| e.point.clone()).collect();
        let labels: Vec<Label> = sample.iter().map(|e| e.label).collect();
        hard_margin_svm_with(&points, &labels, &self.opts)
    }

    fn check_dims(&self, sample: &[Labeled<Vec<f64>>]) -> Result<()> {
        match sample.iter().find(|e| e.point.len() != self.dim) {
            Some(e) => Err(Error::invalid(format!(
                "point of arity {} in a scheme for R^{}",
                e.point.len(),
                self.dim
            ))),
            None => Ok(()),
        }
    }
}

fn same_solution(a: &SvmSolution, b: &SvmSolution, scale: f64) -> bool {
    let wa = &a.hypothesis.weights;
    let wb = &b.hypothesis.weights;
    wa.iter()
        .zip(wb)
        .all(|(x, y)| (x - y).abs() <= SAME_SOLUTION_TOL)
        && (a.hypothesis.threshold - b.hypothesis.threshold).abs() <= SAME_SOLUTION_TOL * scale
        && (a.margin - b.margin).abs() <= SAME_SOLUTION_TOL * a.margin.max(scale * 1e-12)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl CompressionScheme for SvmScheme {
    type Point = Vec<f64>;
    type Reconstruction = Halfspace;

    fn size(&self) -> usize {
        self.dim + 1
    }

    fn compress(&self, sample: &[Labeled<Vec<f64>>]) -> Result<Vec<usize>> {
        if sample.is_empty() {
            return Ok(Vec::new());
        }
        self.check_dims(sample)?;
        let all: Vec<&Labeled<Vec<f64>>> = sample.iter().collect();
        let full = self.solve(&all)?;
        if full.hypothesis.is_constant() {
            let mut best = 0;
            for (i, e) in sample.iter().enumerate() {
                if lex_cmp(&e.point, &sample[best].point) == Ordering::Less {
                    best = i;
                }
            }
            return Ok(vec![best]);
        }
        // first occurrence of each distinct support point
        let mut candidates: Vec<usize> = Vec::new();
        for &i in &full.support_indices {
            if !candidates
                .iter()
                .any(|&c| sample[c].point == sample[i].point)
            {
                candidates.push(i);
            }
        }
        candidates.sort_unstable();
        if candidates.len() > self.max_support {
            return Err(Error::CapExceeded {
                what: "support points for minimal determining subset",
                actual: candidates.len(),
                cap: self.max_support,
            });
        }
        let scale = sample
            .iter()
            .flat_map(|e| e.point.iter())
            .fold(0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for size in 2..=candidates.len() {
            for combo in combinations(candidates.len(), size) {
                let positions: Vec<usize> = combo.iter().map(|&c| candidates[c]).collect();
                let subset: Vec<&Labeled<Vec<f64>>> =
                    positions.iter().map(|&p| &sample[p]).collect();
                let both = subset.iter().any(|e| e.label.is_positive())
                    && subset.iter().any(|e| !e.label.is_positive());
                if !both {
                    continue;
                }
                if same_solution(&self.solve(&subset)?, &full, scale) {
                    return Ok(positions);
                }
            }
        }
        Ok(candidates)
    }

    fn reconstruct(&self, compressed: &[Labeled<Vec<f64>>]) -> Result<Halfspace> {
        if compressed.is_empty() {
            return Ok(Halfspace::constant(self.dim, Label::Positive));
        }
        self.check_dims(compressed)?;
        let refs: Vec<&Labeled<Vec<f64>>> = compressed.iter().collect();
        Ok(self.solve(&refs)?.hypothesis)
    }
}
