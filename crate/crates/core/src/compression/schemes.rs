use std::collections::BTreeMap;

use super::{CompressionScheme, Predictor};
use crate::concept_class::{ConceptClass, Example, Label};
use crate::error::{Error, Result};
use crate::parameters::{vc_dimension, SearchCaps};

/// A reconstruction over a finite domain: a full prediction row, plus the
/// class index it coincides with when the scheme is proper.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitePredictor {
    pub row: Vec<Label>,
    pub hypothesis: Option<usize>,
}

impl Predictor<usize> for FinitePredictor {
    fn predict(&self, x: &usize) -> Label {
        self.row[*x]
    }
}

/// Size-1 stable scheme for singletons over the integer-ordered domain
/// `0..domain_size` (hypothesis `t` is positive exactly at point `t`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingletonScheme {
    pub domain_size: usize,
}

impl SingletonScheme {
    pub fn new(domain_size: usize) -> Self {
        SingletonScheme { domain_size }
    }

    fn singleton(&self, t: usize) -> FinitePredictor {
        FinitePredictor {
            row: (0..self.domain_size)
                .map(|x| Label::from_bool(x == t))
                .collect(),
            hypothesis: Some(t),
        }
    }
}

impl CompressionScheme for SingletonScheme {
    type Point = usize;
    type Reconstruction = FinitePredictor;

    fn size(&self) -> usize {
        1
    }

    /// The first positive entry if there is one, otherwise the first entry
    /// carrying the largest point.
    fn compress(&self, sample: &[Example]) -> Result<Vec<usize>> {
        if let Some(p) = sample.iter().position(|e| e.label.is_positive()) {
            return Ok(vec![p]);
        }
        let mut best: Option<usize> = None;
        for (i, e) in sample.iter().enumerate() {
            if best.is_none_or(|b| e.point > sample[b].point) {
                best = Some(i);
            }
        }
        Ok(best.into_iter().collect())
    }

    fn reconstruct(&self, compressed: &[Example]) -> Result<FinitePredictor> {
        match compressed {
            [] => Ok(self.singleton(0)),
            [e] if e.point >= self.domain_size => Err(Error::invalid(format!(
                "point {} outside domain of size {}",
                e.point, self.domain_size
            ))),
            [e] if e.label.is_positive() => Ok(self.singleton(e.point)),
            [e] => {
                if e.point + 1 < self.domain_size {
                    Ok(self.singleton(e.point + 1))
                } else {
                    Err(Error::Unrepresentable { point: e.point })
                }
            }
            _ => Err(Error::invalid(
                "singleton scheme reconstructs from at most one entry",
            )),
        }
    }
}

/// The Closure algorithm for an intersection-closed class: reconstruct the
/// smallest hypothesis containing the compressed positives.
#[derive(Clone, Debug)]
pub struct ClosureScheme<'a> {
    class: &'a ConceptClass,
    size: usize,
}

impl<'a> ClosureScheme<'a> {
    pub fn new(class: &'a ConceptClass) -> Result<Self> {
        Self::with_caps(class, &SearchCaps::default())
    }

    pub fn with_caps(class: &'a ConceptClass, caps: &SearchCaps) -> Result<Self> {
        if !class.is_intersection_closed() {
            return Err(Error::precondition("class is not intersection-closed"));
        }
        if !(0..class.len()).any(|h| class.row(h).iter().all(|l| !l.is_positive())) {
            return Err(Error::precondition(
                "class has no hypothesis consistent with all-negative data",
            ));
        }
        let size = vc_dimension(class, caps)?;
        Ok(ClosureScheme { class, size })
    }

    /// Index of the smallest hypothesis whose positive set contains `points`.
    pub fn closure(&self, points: &[usize]) -> Result<usize> {
        let n = self.class.domain_size();
        let mut meet = vec![true; n];
        let mut any = false;
        for h in 0..self.class.len() {
            let row = self.class.row(h);
            if points.iter().all(|&x| row[x].is_positive()) {
                any = true;
                for (m, l) in meet.iter_mut().zip(row) {
                    *m &= l.is_positive();
                }
            }
        }
        if !any {
            return Err(Error::Unrealizable);
        }
        let row: Vec<Label> = meet.into_iter().map(Label::from_bool).collect();
        self.class
            .find_row(&row)
            .ok_or_else(|| Error::precondition("class is not intersection-closed"))
    }
}

impl CompressionScheme for ClosureScheme<'_> {
    type Point = usize;
    type Reconstruction = FinitePredictor;

    fn size(&self) -> usize {
        self.size
    }

    /// Greedy removal over the distinct positive points in ascending domain
    /// order, keeping a point only if dropping it shrinks the closure.
    fn compress(&self, sample: &[Example]) -> Result<Vec<usize>> {
        let mut first: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, e) in sample.iter().enumerate() {
            if e.point >= self.class.domain_size() {
                return Err(Error::invalid(format!("point {} outside domain", e.point)));
            }
            if e.label.is_positive() {
                first.entry(e.point).or_insert(i);
            }
        }
        let mut kept: Vec<usize> = first.keys().copied().collect();
        let target = self.closure(&kept)?;
        let candidates = kept.clone();
        for x in candidates {
            let trial: Vec<usize> = kept.iter().copied().filter(|&y| y != x).collect();
            if self.closure(&trial)? == target {
                kept = trial;
            }
        }
        let mut positions: Vec<usize> = kept.iter().map(|x| first[x]).collect();
        positions.sort_unstable();
        Ok(positions)
    }

    fn reconstruct(&self, compressed: &[Example]) -> Result<FinitePredictor> {
        let positives: Vec<usize> = compressed
            .iter()
            .filter(|e| e.label.is_positive())
            .map(|e| e.point)
            .collect();
        let h = self.closure(&positives)?;
        Ok(FinitePredictor {
            row: self.class.row(h).to_vec(),
            hypothesis: Some(h),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{check_stability, check_validity};
    use crate::concept_class::{generate_class, ClassFamily, Labeled};

    fn ex(pairs: &[(usize, i8)]) -> Vec<Example> {
        pairs
            .iter()
            .map(|&(p, l)| Labeled::new(p, Label::from_int(l as i64).unwrap()))
            .collect()
    }

    #[test]
    fn singleton_keeps_the_positive() {
        let s = SingletonScheme::new(10);
        let sample = ex(&[(2, -1), (4, 1)]);
        assert_eq!(s.kappa(&sample).unwrap(), ex(&[(4, 1)]));
        let rho = s.reconstruct(&ex(&[(4, 1)])).unwrap();
        assert_eq!(rho.hypothesis, Some(4));
        assert!(check_validity(&s, &sample));
    }

    #[test]
    fn singleton_all_negative_uses_the_largest_point() {
        let s = SingletonScheme::new(10);
        let sample = ex(&[(2, -1), (5, -1), (3, -1)]);
        assert_eq!(s.kappa(&sample).unwrap(), ex(&[(5, -1)]));
        assert_eq!(s.reconstruct(&ex(&[(5, -1)])).unwrap().hypothesis, Some(6));
        assert!(check_validity(&s, &sample));
        assert!(check_stability(&s, &sample));
        let single = ex(&[(7, -1)]);
        assert_eq!(s.kappa(&single).unwrap(), single);
    }

    #[test]
    fn singleton_last_point_is_unrepresentable() {
        let s = SingletonScheme::new(6);
        assert_eq!(
            s.reconstruct(&ex(&[(5, -1)])).unwrap_err(),
            Error::Unrepresentable { point: 5 }
        );
        assert!(!check_validity(&s, &ex(&[(1, -1), (5, -1)])));
    }

    fn intervals() -> ConceptClass {
        // grid values 1..=8 live at indices 0..=7
        generate_class(&ClassFamily::Intervals {
            grid: (1..=8).map(f64::from).collect(),
            include_empty: true,
        })
        .unwrap()
    }

    #[test]
    fn closure_on_intervals() {
        let c = intervals();
        let s = ClosureScheme::new(&c).unwrap();
        assert_eq!(s.size(), 2);
        // positives at grid values 2, 5, 3
        let sample = ex(&[(1, 1), (4, 1), (2, 1), (6, -1)]);
        assert_eq!(s.kappa(&sample).unwrap(), ex(&[(1, 1), (4, 1)]));
        let rho = s.reconstruct(&ex(&[(1, 1), (4, 1)])).unwrap();
        assert_eq!(c.positive_set(rho.hypothesis.unwrap()), vec![1, 2, 3, 4]);
        assert!(check_validity(&s, &sample));
        assert!(check_stability(&s, &sample));
        let without_three = ex(&[(1, 1), (4, 1), (6, -1)]);
        assert_eq!(s.kappa(&without_three).unwrap(), ex(&[(1, 1), (4, 1)]));
    }

    #[test]
    fn closure_of_nothing_is_empty() {
        let c = intervals();
        let s = ClosureScheme::new(&c).unwrap();
        let sample = ex(&[(0, -1), (3, -1)]);
        assert!(s.kappa(&sample).unwrap().is_empty());
        let rho = s.reconstruct(&[]).unwrap();
        assert!(rho.row.iter().all(|l| !l.is_positive()));
    }

    #[test]
    fn closure_requires_intersection_closed_class() {
        let c = generate_class(&ClassFamily::Intervals {
            grid: (1..=4).map(f64::from).collect(),
            include_empty: false,
        })
        .unwrap();
        assert!(ClosureScheme::new(&c).is_err());
        let thresholds = generate_class(&ClassFamily::Thresholds {
            grid: (1..=4).map(f64::from).collect(),
            augment_all_negative: false,
        })
        .unwrap();
        // intersection-closed but lacks the empty hypothesis
        assert!(thresholds.is_intersection_closed());
        assert!(ClosureScheme::new(&thresholds).is_err());
    }
}
