use serde::{Deserialize, Serialize};

use super::qld::{QueryNode, QueryTree};
use crate::error::{Error, Result};
use crate::model::{InstanceId, InstanceSpace, Label, LabelVector, PatternClass, Validate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observation {
    pub time: usize,
    pub x: InstanceId,
    pub y: Label,
}

/// Results of the queries made so far, oldest first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationHistory(pub Vec<Observation>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub prediction: Label,
    pub query: bool,
}

/// A deterministic blind learner: it sees only the clock and its own query
/// results. Rounds are numbered from 1.
pub trait BlindStrategy {
    fn decide(&self, history: &ObservationHistory, t: usize) -> Decision;
}

/// Predicts a fixed vector and never queries. Rounds past its end get 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedVector(pub LabelVector);

impl BlindStrategy for FixedVector {
    fn decide(&self, _: &ObservationHistory, t: usize) -> Decision {
        Decision {
            prediction: self.0 .0.get(t - 1).copied().unwrap_or(Label::Zero),
            query: false,
        }
    }
}

/// Blind-prediction SOA: walks its policy tree along the observed history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpSoa {
    pub space: InstanceSpace,
    pub tree: QueryTree,
}

impl BlindStrategy for BpSoa {
    fn decide(&self, history: &ObservationHistory, t: usize) -> Decision {
        const OFF_POLICY: Decision = Decision {
            prediction: Label::Zero,
            query: false,
        };
        let mut node = &self.tree.root;
        let mut tp = 0;
        for o in &history.0 {
            let QueryNode::Query { time, children, .. } = node else {
                return OFF_POLICY;
            };
            let name = self.space.name(o.x);
            match children
                .iter()
                .find(|c| *time == o.time && c.x == name && c.y == o.y)
            {
                Some(c) => {
                    tp = *time;
                    node = &c.node;
                }
                None => return OFF_POLICY,
            }
        }
        match node {
            QueryNode::Query {
                time,
                interim,
                prediction,
                ..
            } => {
                if t < *time && t > tp {
                    Decision {
                        prediction: interim.0[t - tp - 1],
                        query: false,
                    }
                } else if t == *time {
                    Decision {
                        prediction: *prediction,
                        query: true,
                    }
                } else {
                    OFF_POLICY
                }
            }
            QueryNode::Blind { from, suffix } => Decision {
                prediction: t
                    .checked_sub(from + 1)
                    .and_then(|i| suffix.0.get(i).copied())
                    .unwrap_or(Label::Zero),
                query: false,
            },
        }
    }
}

/// Mistakes of `strategy` on `pattern`, and the number of queries it made.
pub fn play(strategy: &dyn BlindStrategy, p: &PatternClass, i: usize) -> (u32, usize) {
    let mut history = ObservationHistory::default();
    let mut mistakes = 0;
    for (k, &(x, y)) in p.patterns[i].steps.iter().enumerate() {
        let t = k + 1;
        let d = strategy.decide(&history, t);
        if d.prediction != y {
            mistakes += 1;
        }
        if d.query {
            history.0.push(Observation { time: t, x, y });
        }
    }
    (mistakes, history.0.len())
}

/// The adversary's best pattern against a deterministic strategy. Fails if
/// the strategy ever queries more than `q` times.
pub fn worst_case_mistakes(strategy: &dyn BlindStrategy, p: &PatternClass, q: u32) -> Result<u32> {
    p.check()?;
    let mut worst = 0;
    for i in 0..p.len() {
        let (m, queries) = play(strategy, p, i);
        if queries > q as usize {
            return Err(Error::BudgetExceeded(format!(
                "strategy made {queries} queries on pattern {i}, budget {q}"
            )));
        }
        worst = worst.max(m);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_vector_counts_disagreements() {
        let p = PatternClass::from_label_rows(&["111"]).unwrap();
        let zeros = FixedVector("000".parse().unwrap());
        assert_eq!(worst_case_mistakes(&zeros, &p, 0).unwrap(), 3);
        let perfect = FixedVector("111".parse().unwrap());
        assert_eq!(worst_case_mistakes(&perfect, &p, 0).unwrap(), 0);
    }

    struct AlwaysQuery;
    impl BlindStrategy for AlwaysQuery {
        fn decide(&self, _: &ObservationHistory, _: usize) -> Decision {
            Decision {
                prediction: Label::Zero,
                query: true,
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = PatternClass::from_label_rows(&["01"]).unwrap();
        assert!(matches!(
            worst_case_mistakes(&AlwaysQuery, &p, 1),
            Err(Error::BudgetExceeded(_))
        ));
        assert_eq!(worst_case_mistakes(&AlwaysQuery, &p, 2).unwrap(), 1);
    }
}
