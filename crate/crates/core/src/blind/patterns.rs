use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{Label, PatternClass};

/// Packed view of a pattern class: time `t` (1-based) lives at bit `t - 1`.
pub(crate) struct Packed {
    pub horizon: usize,
    pub labels: Vec<u64>,
    pub xs: Vec<Vec<u32>>,
}

impl Packed {
    pub fn new(p: &PatternClass) -> Packed {
        Packed {
            horizon: p.horizon,
            labels: p.patterns.iter().map(|q| q.labels().to_mask()).collect(),
            xs: p
                .patterns
                .iter()
                .map(|q| q.steps.iter().map(|s| s.0 .0).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn full(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Label of pattern `p` at time `t` (1-based).
    pub fn label(&self, p: usize, t: usize) -> u64 {
        self.labels[p] >> (t - 1) & 1
    }

    /// Labels of `p` at times `lo+1 ..= lo+len`, shifted to bit 0.
    pub fn slice(&self, p: usize, lo: usize, len: usize) -> u64 {
        if len == 0 {
            0
        } else {
            self.labels[p] >> lo & (u64::MAX >> (64 - len))
        }
    }
}

/// Patterns matching every label and instance constraint. Times are 1-based.
pub fn restrict_patterns(
    p: &PatternClass,
    label_constraints: &BTreeMap<usize, Label>,
    instance_constraints: &BTreeMap<usize, String>,
) -> Result<PatternClass> {
    let bad = label_constraints
        .keys()
        .chain(instance_constraints.keys())
        .find(|&&t| t == 0 || t > p.horizon);
    if let Some(t) = bad {
        return Err(Error::InvalidParameter(format!(
            "constraint time {t} outside [1, {}]",
            p.horizon
        )));
    }
    let patterns = p
        .patterns
        .iter()
        .filter(|q| {
            label_constraints
                .iter()
                .all(|(&t, &y)| q.steps[t - 1].1 == y)
                && instance_constraints
                    .iter()
                    .all(|(&t, x)| p.space.name(q.steps[t - 1].0) == x)
        })
        .cloned()
        .collect();
    Ok(PatternClass {
        space: p.space.clone(),
        horizon: p.horizon,
        patterns,
    })
}
