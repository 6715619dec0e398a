use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{quantiles, trial_rng};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// `k (ln(k/m) - 1 - sqrt(2/m))`: below this many uniform draws from `k`
/// coupons, fewer than `k - m` distinct ones show up with probability
/// above one half.
pub fn coupon_lemma_bound(k: usize, m: usize) -> f64 {
    let (k, m) = (k as f64, m as f64);
    k * ((k / m).ln() - 1.0 - (2.0 / m).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouponResult {
    pub k: usize,
    pub m: usize,
    pub trials: usize,
    pub lemma_bound: f64,
    /// Average of the two middle order statistics.
    pub median: f64,
    pub mean: f64,
    /// Fraction of trials with `Z <= lemma_bound`.
    pub at_or_below_bound: f64,
    pub quantiles: BTreeMap<String, f64>,
}

/// Draws until `k - m` distinct coupons are seen; returns the draw count.
fn draws_until(rng: &mut impl Rng, k: usize, m: usize) -> usize {
    let need = k - m;
    let mut seen = vec![false; k];
    let (mut distinct, mut draws) = (0, 0);
    while distinct < need {
        let c = rng.gen_range(0..k);
        draws += 1;
        if !seen[c] {
            seen[c] = true;
            distinct += 1;
        }
    }
    draws
}

pub fn coupon_collector(k: usize, m: usize, trials: usize, seed: u64) -> Result<CouponResult> {
    if m == 0 || m > k {
        return Err(Error::invalid(format!(
            "need 1 <= m <= k, got k = {k}, m = {m}"
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let zs: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| draws_until(&mut trial_rng(seed, t as u64), k, m))
        .collect();
    let mut sorted: Vec<f64> = zs.iter().map(|&z| z as f64).collect();
    let q = quantiles(&mut sorted);
    let mid = trials / 2;
    let median = if trials % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    let bound = coupon_lemma_bound(k, m);
    Ok(CouponResult {
        k,
        m,
        trials,
        lemma_bound: bound,
        median,
        mean: sorted.iter().sum::<f64>() / trials as f64,
        at_or_below_bound: sorted.iter().filter(|&&z| z <= bound).count() as f64 / trials as f64,
        quantiles: q,
    })
}
