//! Finite concept classes over finite domains.
//!
//! A class is stored densely as a `|H| x |X|` matrix of ±1 labels. Samples
//! are ordered sequences of `(point index, label)` pairs and may repeat
//! entries.

pub(crate) mod families;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use families::{generate_class, hard_class_index, ClassFamily};

/// A binary label. Serialized as the integers `-1` and `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn from_int(v: i64) -> Result<Label> {
        match v {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::invalid(format!(
                "label must be -1 or 1, got {other}"
            ))),
        }
    }

    /// Sign convention with `sign(0) = +1`.
    pub fn from_sign(v: f64) -> Label {
        if v >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn from_bool(positive: bool) -> Label {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // Only the integers -1 and 1 are accepted; 1.0 or "1" are rejected.
        let v = serde_json::Value::deserialize(d)?;
        match v.as_i64() {
            Some(i) if v.is_i64() || v.is_u64() => {
                Label::from_int(i).map_err(serde::de::Error::custom)
            }
            _ => Err(serde::de::Error::custom(format!(
                "label must be the integer -1 or 1, got {v}"
            ))),
        }
    }
}

/// A labeled example over an arbitrary point type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Labeled<P> {
    pub point: P,
    pub label: Label,
}

impl<P> Labeled<P> {
    pub fn new(point: P, label: Label) -> Self {
        Labeled { point, label }
    }
}

/// A labeled example whose point is an index into a class domain.
pub type Example = Labeled<usize>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

impl DomainPoint {
    pub fn named(id: impl Into<String>) -> Self {
        DomainPoint {
            id: id.into(),
            coords: None,
        }
    }

    pub fn with_coords(id: impl Into<String>, coords: Vec<f64>) -> Self {
        DomainPoint {
            id: id.into(),
            coords: Some(coords),
        }
    }
}

#[derive(Deserialize)]
struct RawClass {
    domain: Vec<DomainPoint>,
    hypotheses: Vec<Vec<Label>>,
}

/// A finite set of classifiers over a finite domain.
///
/// Hypotheses are addressed by their row index; rows are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct ConceptClass {
    domain: Vec<DomainPoint>,
    hypotheses: Vec<Vec<Label>>,
}

impl TryFrom<RawClass> for ConceptClass {
    type Error = Error;

    fn try_from(raw: RawClass) -> Result<Self> {
        ConceptClass::new(raw.domain, raw.hypotheses)
    }
}

impl ConceptClass {
    pub fn new(domain: Vec<DomainPoint>, hypotheses: Vec<Vec<Label>>) -> Result<Self> {
        let mut ids = HashSet::new();
        for p in &domain {
            if !ids.insert(p.id.as_str()) {
                return Err(Error::invalid(format!("duplicate domain id {:?}", p.id)));
            }
        }
        let with_coords = domain.iter().filter(|p| p.coords.is_some()).count();
        if with_coords != 0 && with_coords != domain.len() {
            return Err(Error::invalid(
                "either all domain points carry coords or none do",
            ));
        }
        if let Some(arity) = domain.first().and_then(|p| p.coords.as_ref().map(Vec::len)) {
            for p in &domain {
                let c = p.coords.as_ref().expect("checked above");
                if c.len() != arity {
                    return Err(Error::invalid(format!(
                        "point {:?} has {} coords, expected {arity}",
                        p.id,
                        c.len()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(format!(
                        "point {:?} has non-finite coords",
                        p.id
                    )));
                }
            }
        }
        let mut seen = HashSet::new();
        for (i, row) in hypotheses.iter().enumerate() {
            if row.len() != domain.len() {
                return Err(Error::invalid(format!(
                    "hypothesis {i} has {} predictions, domain has {} points",
                    row.len(),
                    domain.len()
                )));
            }
            if !seen.insert(row.as_slice()) {
                return Err(Error::invalid(format!(
                    "hypothesis {i} duplicates an earlier row"
                )));
            }
        }
        Ok(ConceptClass { domain, hypotheses })
    }

    pub fn domain(&self) -> &[DomainPoint] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn row(&self, h: usize) -> &[Label] {
        &self.hypotheses[h]
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.hypotheses
    }

    #[inline]
    pub fn predict(&self, h: usize, x: usize) -> Label {
        self.hypotheses[h][x]
    }

    /// Index of the hypothesis with exactly this prediction row.
    pub fn find_row(&self, row: &[Label]) -> Option<usize> {
        self.hypotheses.iter().position(|r| r.as_slice() == row)
    }

    /// Point index by id.
    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.domain.iter().position(|p| p.id == id)
    }

    pub fn agrees(&self, h: usize, sample: &LabeledSample) -> bool {
        sample
            .entries()
            .iter()
            .all(|e| self.hypotheses[h][e.point] == e.label)
    }

    /// Indices of the hypotheses consistent with every entry of `sample`.
    pub fn consistent_subclass(&self, sample: &LabeledSample) -> Result<Vec<usize>> {
        sample.validate(self)?;
        Ok((0..self.len())
            .filter(|&h| self.agrees(h, sample))
            .collect())
    }

    pub fn is_realizable(&self, sample: &LabeledSample) -> Result<bool> {
        sample.validate(self)?;
        Ok((0..self.len()).any(|h| self.agrees(h, sample)))
    }

    /// Positive set of hypothesis `h` as a sorted list of point indices.
    pub fn positive_set(&self, h: usize) -> Vec<usize> {
        self.hypotheses[h]
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_positive())
            .map(|(x, _)| x)
            .collect()
    }

    pub fn is_intersection_closed(&self) -> bool {
        let rows: HashSet<&[Label]> = self.hypotheses.iter().map(Vec::as_slice).collect();
        for a in &self.hypotheses {
            for b in &self.hypotheses {
                let meet: Vec<Label> = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| Label::from_bool(x.is_positive() && y.is_positive()))
                    .collect();
                if !rows.contains(meet.as_slice()) {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest superclass whose positive sets are closed under intersection.
    ///
    /// Original hypotheses keep their indices; added rows follow in
    /// lexicographic order of their positive sets.
    pub fn intersection_closure(&self) -> ConceptClass {
        let to_set = |row: &[Label]| -> BTreeSet<usize> {
            row.iter()
                .enumerate()
                .filter(|(_, l)| l.is_positive())
                .map(|(x, _)| x)
                .collect()
        };
        let originals: Vec<BTreeSet<usize>> = self.hypotheses.iter().map(|r| to_set(r)).collect();
        let mut all: BTreeSet<BTreeSet<usize>> = originals.iter().cloned().collect();
        let mut frontier: Vec<BTreeSet<usize>> = originals.clone();
        while !frontier.is_empty() {
            let snapshot: Vec<BTreeSet<usize>> = all.iter().cloned().collect();
            let mut next = Vec::new();
            for a in &frontier {
                for b in &snapshot {
                    let meet: BTreeSet<usize> = a.intersection(b).copied().collect();
                    if !all.contains(&meet) {
                        all.insert(meet.clone());
                        next.push(meet);
                    }
                }
            }
            frontier = next;
        }
        let known: HashSet<&BTreeSet<usize>> = originals.iter().collect();
        let mut rows = self.hypotheses.clone();
        for set in all.iter().filter(|s| !known.contains(s)) {
            let mut row = vec![Label::Negative; self.domain.len()];
            for &x in set {
                row[x] = Label::Positive;
            }
            rows.push(row);
        }
        ConceptClass {
            domain: self.domain.clone(),
            hypotheses: rows,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("class serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// An ordered sequence of labeled examples; duplicates are allowed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    entries: Vec<Example>,
}

impl LabeledSample {
    pub fn new(entries: Vec<Example>) -> Self {
        LabeledSample { entries }
    }

    pub fn empty() -> Self {
        LabeledSample::default()
    }

    /// Builds a sample from `(point, ±1)` pairs.
    pub fn from_pairs(pairs: &[(usize, i8)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|&(p, l)| Label::from_int(l as i64).map(|label| Labeled::new(p, label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledSample { entries })
    }

    /// Labels every listed point with hypothesis `h`.
    pub fn labeled_by(class: &ConceptClass, h: usize, points: &[usize]) -> Self {
        LabeledSample {
            entries: points
                .iter()
                .map(|&x| Labeled::new(x, class.predict(h, x)))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[Example] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, e: Example) {
        self.entries.push(e);
    }

    pub fn validate(&self, class: &ConceptClass) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.point >= class.domain_size() {
                return Err(Error::invalid(format!(
                    "entry {i} refers to point {} but the domain has {} points",
                    e.point,
                    class.domain_size()
                )));
            }
        }
        Ok(())
    }

    /// Concatenation `self ∪ other` as sequences.
    pub fn concat(&self, other: &LabeledSample) -> LabeledSample {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        LabeledSample { entries }
    }

    /// Sub-sequence at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> LabeledSample {
        LabeledSample {
            entries: positions.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// The sample with entry `position` removed.
    pub fn without(&self, position: usize) -> LabeledSample {
        let mut entries = self.entries.clone();
        entries.remove(position);
        LabeledSample { entries }
    }

    /// The sample with the label of entry `position` flipped.
    pub fn flipped(&self, position: usize) -> LabeledSample {
        let mut entries = self.entries.clone();
        entries[position].label = entries[position].label.flip();
        LabeledSample { entries }
    }

    /// All one-flip neighbors, the i-th flipping entry i.
    pub fn neighbors(&self) -> Result<Vec<LabeledSample>> {
        if self.is_empty() {
            return Err(Error::invalid("an empty sample has no neighbors"));
        }
        Ok((0..self.len()).map(|i| self.flipped(i)).collect())
    }
}

impl FromIterator<Example> for LabeledSample {
    fn from_iter<I: IntoIterator<Item = Example>>(iter: I) -> Self {
        LabeledSample {
            entries: iter.into_iter().collect(),
        }
    }
}
