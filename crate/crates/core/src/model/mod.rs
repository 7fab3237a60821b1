//! Domain types shared by every solver and simulator.
//!
//! Values here are plain data. Constructors do not reject malformed input;
//! [`Validate::validate`] lists every invariant violation instead, and the
//! JSON entry points in [`json`] refuse anything that does not validate.

mod budget;
pub mod json;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use budget::QueryBudgetPolicy;

use crate::error::{Error, Result};

/// A binary label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Zero, Label::One];

    pub fn from_bit(bit: u64) -> Option<Label> {
        match bit {
            0 => Some(Label::Zero),
            1 => Some(Label::One),
            _ => None,
        }
    }

    pub fn from_bool(b: bool) -> Label {
        if b {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.bit())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u64::deserialize(d)?;
        Label::from_bit(v)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {v}")))
    }
}

/// Finite sequence of labels. Displays and serializes as a bit string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector(pub Vec<Label>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming(&self, other: &LabelVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
            + self.len().abs_diff(other.len())
    }

    /// Packs the vector into a word, position `i` at bit `i`.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, l)| m | (u64::from(l.bit()) << i))
    }

    pub fn from_mask(mask: u64, len: usize) -> LabelVector {
        LabelVector(
            (0..len)
                .map(|i| Label::from_bool(mask >> i & 1 == 1))
                .collect(),
        )
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LabelVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Label::Zero),
                '1' => Ok(Label::One),
                _ => Err(Error::InvalidParameter(format!(
                    "bad label character {c:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(LabelVector)
    }
}

impl Serialize for LabelVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LabelVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Position of an instance inside its [`InstanceSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId(pub u32);

impl InstanceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered list of opaque instance tokens. The order is the tie-break order
/// used everywhere.
#[derive(Clone, Debug)]
pub struct InstanceSpace {
    ids: Vec<String>,
    index: HashMap<String, InstanceId>,
}

impl InstanceSpace {
    pub fn new<I, S>(ids: I) -> InstanceSpace
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            index.entry(id.clone()).or_insert(InstanceId(i as u32));
        }
        InstanceSpace { ids, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn lookup(&self, token: &str) -> Option<InstanceId> {
        self.index.get(token).copied()
    }

    pub fn require(&self, token: &str) -> Result<InstanceId> {
        self.lookup(token)
            .ok_or_else(|| Error::UnknownInstance(token.to_owned()))
    }

    pub fn name(&self, id: InstanceId) -> &str {
        &self.ids[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = InstanceId> + '_ {
        (0..self.ids.len() as u32).map(InstanceId)
    }
}

impl PartialEq for InstanceSpace {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
    }
}

impl Eq for InstanceSpace {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub name: String,
    pub labels: Vec<Label>,
}

impl Concept {
    pub fn label(&self, x: InstanceId) -> Label {
        self.labels[x.index()]
    }
}

/// A finite concept class: distinct label vectors over an instance space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptClass {
    pub space: InstanceSpace,
    pub concepts: Vec<Concept>,
}

impl ConceptClass {
    pub fn new(space: InstanceSpace, concepts: Vec<Concept>) -> ConceptClass {
        ConceptClass { space, concepts }
    }

    /// Every binary function on `ids`, named `h<bits>` in counting order.
    pub fn all_functions<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> ConceptClass {
        let space = InstanceSpace::new(ids);
        let n = space.len();
        assert!(n < 24, "refusing to enumerate 2^{n} concepts");
        let concepts = (0u64..1 << n)
            .map(|m| {
                let v = LabelVector::from_mask(m, n);
                Concept {
                    name: format!("h{v}"),
                    labels: v.0,
                }
            })
            .collect();
        ConceptClass { space, concepts }
    }

    /// Builds a class from bit-string rows such as `["00", "11"]`.
    pub fn from_rows<S: Into<String>>(
        ids: impl IntoIterator<Item = S>,
        rows: &[&str],
    ) -> Result<ConceptClass> {
        let space = InstanceSpace::new(ids);
        let concepts = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(Concept {
                    name: format!("h{}", i + 1),
                    labels: r.parse::<LabelVector>()?.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConceptClass { space, concepts })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Does some concept label every pair in `pairs` correctly?
    pub fn realizes(&self, pairs: &[(InstanceId, Label)]) -> bool {
        self.concepts
            .iter()
            .any(|h| pairs.iter().all(|&(x, y)| h.label(x) == y))
    }
}

/// One constant piece `[start, end)` of a stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub x: String,
    pub y: Label,
}

impl Segment {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Piecewise-constant continuous stream on `[0, horizon)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseStream {
    pub horizon: f64,
    pub segments: Vec<Segment>,
}

impl PiecewiseStream {
    /// The segment covering time `t`, if any.
    pub fn at(&self, t: f64) -> Option<&Segment> {
        let i = self.segments.partition_point(|s| s.end <= t);
        self.segments.get(i).filter(|s| s.start <= t && t < s.end)
    }

    /// Merges adjacent segments carrying the same pair.
    pub fn coalesced(&self) -> PiecewiseStream {
        let mut out: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            match out.last_mut() {
                Some(last) if last.x == s.x && last.y == s.y && last.end == s.start => {
                    last.end = s.end
                }
                _ => out.push(s.clone()),
            }
        }
        PiecewiseStream {
            horizon: self.horizon,
            segments: out,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscretePattern {
    pub steps: Vec<(InstanceId, Label)>,
}

impl DiscretePattern {
    pub fn labels(&self) -> LabelVector {
        LabelVector(self.steps.iter().map(|&(_, y)| y).collect())
    }
}

/// Finite set of equal-length discrete patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternClass {
    pub space: InstanceSpace,
    pub horizon: usize,
    pub patterns: Vec<DiscretePattern>,
}

impl PatternClass {
    /// Builds a class from `(instance, label)` rows written as e.g. `"a0 b1"`.
    pub fn from_rows<S: Into<String>>(
        ids: impl IntoIterator<Item = S>,
        rows: &[&str],
    ) -> Result<PatternClass> {
        let space = InstanceSpace::new(ids);
        let mut patterns = Vec::with_capacity(rows.len());
        for row in rows {
            let mut steps = Vec::new();
            for tok in row.split_whitespace() {
                let (x, y) = tok.split_at(tok.len() - 1);
                let y = y
                    .parse::<u64>()
                    .ok()
                    .and_then(Label::from_bit)
                    .ok_or_else(|| Error::InvalidParameter(format!("bad step {tok:?}")))?;
                steps.push((space.require(x)?, y));
            }
            patterns.push(DiscretePattern { steps });
        }
        let horizon = patterns.first().map_or(0, |p| p.steps.len());
        Ok(PatternClass {
            space,
            horizon,
            patterns,
        })
    }

    /// Single-instance class whose label vectors are the given bit strings.
    pub fn from_label_rows(rows: &[&str]) -> Result<PatternClass> {
        let spaced: Vec<String> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| format!("a{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let refs: Vec<&str> = spaced.iter().map(String::as_str).collect();
        PatternClass::from_rows(["a"], &refs)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// The set of label vectors realized by `class`, duplicates collapsed.
pub fn project_labels(class: &PatternClass) -> BTreeSet<LabelVector> {
    class.patterns.iter().map(DiscretePattern::labels).collect()
}

/// One broken invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation(pub String);

impl Violation {
    fn new(msg: impl Into<String>) -> Violation {
        Violation(msg.into())
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub trait Validate {
    /// Every invariant violation, empty when the value is valid.
    fn validate(&self) -> Vec<Violation>;

    fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }
}

impl Validate for InstanceSpace {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.ids.is_empty() {
            out.push(Violation::new("instance space is empty"));
        }
        if self.index.len() != self.ids.len() {
            let mut seen = BTreeSet::new();
            for id in &self.ids {
                if !seen.insert(id) {
                    out.push(Violation::new(format!("duplicate instance {id:?}")));
                }
            }
        }
        out
    }
}

impl Validate for ConceptClass {
    fn validate(&self) -> Vec<Violation> {
        let mut out = self.space.validate();
        if self.concepts.is_empty() {
            out.push(Violation::new("concept class is empty"));
        }
        let n = self.space.len();
        let mut seen = BTreeSet::new();
        for h in &self.concepts {
            if h.labels.len() != n {
                out.push(Violation::new(format!(
                    "concept {:?}: length mismatch ({} labels for {} instances)",
                    h.name,
                    h.labels.len(),
                    n
                )));
            } else if !seen.insert(&h.labels) {
                out.push(Violation::new(format!(
                    "concept {:?} duplicates an earlier label vector",
                    h.name
                )));
            }
        }
        out
    }
}

impl Validate for PiecewiseStream {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.horizon.is_finite() || self.horizon < 0.0 {
            out.push(Violation::new(format!(
                "horizon {} is not a finite non-negative time",
                self.horizon
            )));
            return out;
        }
        let mut cursor = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            if !s.start.is_finite() || !s.end.is_finite() {
                out.push(Violation::new(format!("segment {i}: non-finite bound")));
                continue;
            }
            if s.start >= s.end {
                out.push(Violation::new(format!(
                    "segment {i}: empty or reversed [{},{})",
                    s.start, s.end
                )));
            }
            if s.start > cursor {
                out.push(Violation::new(format!("gap [{},{})", cursor, s.start)));
            } else if s.start < cursor {
                out.push(Violation::new(format!("overlap [{},{})", s.start, cursor)));
            }
            cursor = cursor.max(s.end);
        }
        if cursor < self.horizon {
            out.push(Violation::new(format!("gap [{},{})", cursor, self.horizon)));
        } else if cursor > self.horizon {
            out.push(Violation::new(format!(
                "segments run past horizon {} to {}",
                self.horizon, cursor
            )));
        }
        out
    }
}

impl Validate for DiscretePattern {
    fn validate(&self) -> Vec<Violation> {
        if self.steps.is_empty() {
            vec![Violation::new("pattern is empty")]
        } else {
            Vec::new()
        }
    }
}

impl Validate for PatternClass {
    fn validate(&self) -> Vec<Violation> {
        let mut out = self.space.validate();
        if self.horizon == 0 {
            out.push(Violation::new("horizon must be positive"));
        }
        if self.horizon > 64 {
            out.push(Violation::new(format!(
                "horizon {} exceeds 64",
                self.horizon
            )));
        }
        if self.patterns.is_empty() {
            out.push(Violation::new("pattern class is empty"));
        }
        let mut seen = BTreeSet::new();
        for (i, p) in self.patterns.iter().enumerate() {
            out.extend(p.validate());
            if p.steps.len() != self.horizon {
                out.push(Violation::new(format!(
                    "pattern {i}: length mismatch ({} steps, horizon {})",
                    p.steps.len(),
                    self.horizon
                )));
            }
            if p.steps.iter().any(|(x, _)| x.index() >= self.space.len()) {
                out.push(Violation::new(format!(
                    "pattern {i}: instance out of range"
                )));
            }
            if !seen.insert(p) {
                out.push(Violation::new(format!("pattern {i} is a duplicate")));
            }
        }
        out
    }
}

impl Validate for QueryBudgetPolicy {
    fn validate(&self) -> Vec<Violation> {
        let (n, d) = self.slope_parts();
        if n == 0 || d == 0 {
            vec![Violation::new("budget slope must be a positive rational")]
        } else {
            Vec::new()
        }
    }
}
