//! Sample compression schemes, their validity and stability checks, and the
//! generalization bound for stable schemes.

mod block_family;
mod schemes;
pub mod trials;

use crate::concept_class::{Label, Labeled};
use crate::error::{Error, Result};

pub use block_family::{block_family, BlockFamily};
pub use schemes::{ClosureScheme, FinitePredictor, SingletonScheme};

/// Anything that labels points.
pub trait Predictor<P> {
    fn predict(&self, x: &P) -> Label;
}

/// A `(kappa, rho)` pair of declared size `size()`.
///
/// `compress` returns strictly increasing positions into the sample, so
/// `kappa(S)` is a subsequence of `S` by construction.
pub trait CompressionScheme {
    type Point: Clone + PartialEq;
    type Reconstruction: Predictor<Self::Point>;

    fn size(&self) -> usize;

    fn compress(&self, sample: &[Labeled<Self::Point>]) -> Result<Vec<usize>>;

    fn reconstruct(&self, compressed: &[Labeled<Self::Point>]) -> Result<Self::Reconstruction>;

    fn kappa(&self, sample: &[Labeled<Self::Point>]) -> Result<Vec<Labeled<Self::Point>>> {
        let positions = self.compress(sample)?;
        Ok(positions.iter().map(|&i| sample[i].clone()).collect())
    }
}

fn is_subsequence_selection(positions: &[usize], len: usize) -> bool {
    positions.windows(2).all(|w| w[0] < w[1]) && positions.iter().all(|&i| i < len)
}

/// `rho(kappa(S))` reproduces every label of `S` and `|kappa(S)| <= size`.
///
/// A compression or reconstruction error counts as a failure to recover.
pub fn check_validity<S: CompressionScheme>(scheme: &S, sample: &[Labeled<S::Point>]) -> bool {
    let Ok(positions) = scheme.compress(sample) else {
        return false;
    };
    if positions.len() > scheme.size() || !is_subsequence_selection(&positions, sample.len()) {
        return false;
    }
    let compressed: Vec<Labeled<S::Point>> = positions.iter().map(|&i| sample[i].clone()).collect();
    let Ok(rho) = scheme.reconstruct(&compressed) else {
        return false;
    };
    sample.iter().all(|e| rho.predict(&e.point) == e.label)
}

/// Removing any entry outside `kappa(S)` leaves `kappa` unchanged, compared
/// as sequences of entries.
pub fn check_stability<S: CompressionScheme>(scheme: &S, sample: &[Labeled<S::Point>]) -> bool {
    let Ok(positions) = scheme.compress(sample) else {
        return false;
    };
    let kappa: Vec<&Labeled<S::Point>> = positions.iter().map(|&i| &sample[i]).collect();
    (0..sample.len())
        .filter(|i| positions.binary_search(i).is_err())
        .all(|removed| {
            let mut sub = sample.to_vec();
            sub.remove(removed);
            match scheme.kappa(&sub) {
                Ok(k) => k.len() == kappa.len() && k.iter().zip(&kappa).all(|(a, b)| a == *b),
                Err(_) => false,
            }
        })
}

/// Error bound `2/(m - 2l) * (l ln 4 + ln(1/delta))` for a stable scheme of
/// size `l` trained on `m > 2l` examples.
pub fn generalization_bound(size: usize, m: usize, delta: f64) -> Result<f64> {
    if m <= 2 * size {
        return Err(Error::precondition(format!(
            "need m > 2l, got m = {m}, l = {size}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let l = size as f64;
    Ok(2.0 / (m as f64 - 2.0 * l) * (l * 4f64.ln() + (1.0 / delta).ln()))
}
