use serde::Serialize;

use crate::concept_class::families::combinations;
use crate::error::{Error, Result};

/// Index family built from `2l` contiguous blocks of `0..m`: every union of
/// `l` blocks is a member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockFamily {
    pub m: usize,
    pub l: usize,
    /// Half-open index ranges, in order.
    pub blocks: Vec<(usize, usize)>,
    /// Each member as a sorted list of indices in `0..m`.
    pub family: Vec<Vec<usize>>,
    /// `l * floor(m / 2l)`
    pub t_m: usize,
}

pub fn block_family(m: usize, l: usize) -> Result<BlockFamily> {
    if l == 0 {
        return Err(Error::invalid("block family needs l >= 1"));
    }
    if m < 2 * l {
        return Err(Error::precondition(format!(
            "need m >= 2l, got m = {m}, l = {l}"
        )));
    }
    let parts = 2 * l;
    let (base, extra) = (m / parts, m % parts);
    let mut blocks = Vec::with_capacity(parts);
    let mut start = 0;
    for b in 0..parts {
        let len = base + usize::from(b < extra);
        blocks.push((start, start + len));
        start += len;
    }
    let family = combinations(parts, l)
        .into_iter()
        .map(|chosen| {
            chosen
                .into_iter()
                .flat_map(|b| blocks[b].0..blocks[b].1)
                .collect()
        })
        .collect();
    Ok(BlockFamily {
        m,
        l,
        blocks,
        family,
        t_m: l * base,
    })
}

impl BlockFamily {
    /// Largest member size; property (i) asks for at most `m - t_m`.
    pub fn max_member_size(&self) -> usize {
        self.family.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// A member containing every given index, if any.
    pub fn covering_member(&self, indices: &[usize]) -> Option<&[usize]> {
        self.family
            .iter()
            .find(|member| indices.iter().all(|i| member.binary_search(i).is_ok()))
            .map(Vec::as_slice)
    }

    /// `(ln |family| + ln(1/delta)) / t_m`
    pub fn error_bound(&self, delta: f64) -> f64 {
        ((self.family.len() as f64).ln() + (1.0 / delta).ln()) / self.t_m as f64
    }
}
