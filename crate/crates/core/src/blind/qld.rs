//! The query-learning-distance recursion and the policy tree read off it.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::center::weighted_center;
use super::patterns::Packed;
use crate::model::{InstanceSpace, Label, LabelVector, PatternClass};

/// Policy tree of a query-bounded blind learner.
///
/// A `query` node predicts `interim` on the rounds strictly between the
/// previous query and `time`, predicts `prediction` at `time` and queries
/// there; its children are keyed by the observed `(x, y)`. A `blind` node
/// predicts `suffix` on every round after `from`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QueryNode {
    Query {
        time: usize,
        interim: LabelVector,
        prediction: Label,
        children: Vec<QueryBranch>,
    },
    Blind {
        from: usize,
        suffix: LabelVector,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBranch {
    pub x: String,
    pub y: Label,
    pub node: QueryNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTree {
    pub budget: u32,
    pub horizon: usize,
    pub root: QueryNode,
}

impl QueryTree {
    /// Fewest and most query nodes on a root-to-leaf path.
    pub fn query_depths(&self) -> (usize, usize) {
        fn go(n: &QueryNode) -> (usize, usize) {
            match n {
                QueryNode::Blind { .. } => (0, 0),
                QueryNode::Query { children, .. } => {
                    let (lo, hi) = children
                        .iter()
                        .map(|c| go(&c.node))
                        .fold((usize::MAX, 0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
                    (lo.min(hi) + 1, hi + 1)
                }
            }
        }
        go(&self.root)
    }

    /// Query times strictly increase along every path.
    pub fn is_increasing(&self) -> bool {
        fn go(n: &QueryNode, after: usize) -> bool {
            match n {
                QueryNode::Blind { from, .. } => *from == after,
                QueryNode::Query { time, children, .. } => {
                    *time > after && children.iter().all(|c| go(&c.node, *time))
                }
            }
        }
        go(&self.root, 0)
    }
}

type Groups = BTreeMap<(u64, u32), [FixedBitSet; 2]>;

/// Memoized solver over subsets of one pattern class. Single-threaded.
pub(crate) struct QldSolver {
    k: Packed,
    space: InstanceSpace,
    memo: RefCell<HashMap<(FixedBitSet, u32, usize), u32>>,
    blind_memo: RefCell<HashMap<(FixedBitSet, usize), (u32, u64)>>,
}

impl QldSolver {
    pub fn new(p: &PatternClass) -> QldSolver {
        QldSolver {
            k: Packed::new(p),
            space: p.space.clone(),
            memo: RefCell::new(HashMap::new()),
            blind_memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn full(&self) -> FixedBitSet {
        self.k.full()
    }

    /// Blind 1-center of `s` on rounds `tp+1 ..= L`.
    pub fn blind(&self, s: &FixedBitSet, tp: usize) -> (u32, u64) {
        let key = (s.clone(), tp);
        if let Some(&v) = self.blind_memo.borrow().get(&key) {
            return v;
        }
        let n = self.k.horizon - tp;
        let rows: Vec<(u64, u32)> = s.ones().map(|p| (self.k.slice(p, tp, n), 0)).collect();
        let v = weighted_center(&rows, n);
        self.blind_memo.borrow_mut().insert(key, v);
        v
    }

    /// Adversary choices for a query at `ti` after `tp`: interim label prefix
    /// and instance at `ti`, each split by the label at `ti`.
    fn groups(&self, s: &FixedBitSet, tp: usize, ti: usize) -> Groups {
        let g = ti - tp - 1;
        let mut out: Groups = BTreeMap::new();
        for p in s.ones() {
            let key = (self.k.slice(p, tp, g), self.k.xs[p][ti - 1]);
            let e = out.entry(key).or_insert_with(|| {
                [
                    FixedBitSet::with_capacity(self.k.len()),
                    FixedBitSet::with_capacity(self.k.len()),
                ]
            });
            e[self.k.label(p, ti) as usize].insert(p);
        }
        out
    }

    /// Value of the query branch: both labels live → larger subtree, or one
    /// more than a tie; one label live → that subtree.
    fn branch(&self, pair: &[FixedBitSet; 2], q: u32, ti: usize) -> u32 {
        let t = |b: usize| (!pair[b].is_clear()).then(|| self.value(&pair[b], q - 1, ti));
        match (t(0), t(1)) {
            (Some(t0), Some(t1)) if t0 != t1 => t0.max(t1),
            (Some(t0), Some(_)) => t0 + 1,
            (Some(t), None) | (None, Some(t)) => t,
            (None, None) => unreachable!("empty group"),
        }
    }

    pub fn value(&self, s: &FixedBitSet, q: u32, tp: usize) -> u32 {
        if q == 0 || tp == self.k.horizon {
            return self.blind(s, tp).0;
        }
        let key = (s.clone(), q, tp);
        if let Some(&v) = self.memo.borrow().get(&key) {
            return v;
        }
        let v = self.choose(s, q, tp).0;
        self.memo.borrow_mut().insert(key, v);
        v
    }

    /// Best `(value, next query time, interim vector)` for `q > 0`, `tp < L`.
    /// Ties go to the earlier time, then the lexicographically first vector.
    pub fn choose(&self, s: &FixedBitSet, q: u32, tp: usize) -> (u32, usize, u64) {
        let mut best = (u32::MAX, 0, 0);
        for ti in tp + 1..=self.k.horizon {
            let rows: Vec<(u64, u32)> = self
                .groups(s, tp, ti)
                .iter()
                .map(|(&(prefix, _), pair)| (prefix, self.branch(pair, q, ti)))
                .collect();
            let (v, y) = weighted_center(&rows, ti - tp - 1);
            if v < best.0 {
                best = (v, ti, y);
            }
        }
        best
    }

    /// Policy for a learner that only knows the observed query results:
    /// at every information state it re-solves on the patterns consistent
    /// with what it has seen.
    pub fn tree(&self, s: &FixedBitSet, q: u32, tp: usize) -> QueryNode {
        let l = self.k.horizon;
        if q == 0 || tp == l {
            let (_, y) = self.blind(s, tp);
            return QueryNode::Blind {
                from: tp,
                suffix: LabelVector::from_mask(y, l - tp),
            };
        }
        let (_, ti, yhat) = self.choose(s, q, tp);
        let g = ti - tp - 1;
        // larger worst-case subtree under each prediction, ties to 0
        let mut score = [-1i64; 2];
        for (&(prefix, _), pair) in &self.groups(s, tp, ti) {
            let h = (prefix ^ yhat).count_ones();
            for r in 0..2 {
                if !pair[r].is_clear() {
                    let v = h + self.value(&pair[r], q - 1, ti);
                    score[r] = score[r].max(i64::from(v));
                }
            }
        }
        let prediction = Label::from_bool(score[1] > score[0]);

        let mut observed: BTreeMap<(u32, u64), FixedBitSet> = BTreeMap::new();
        for p in s.ones() {
            observed
                .entry((self.k.xs[p][ti - 1], self.k.label(p, ti)))
                .or_insert_with(|| FixedBitSet::with_capacity(self.k.len()))
                .insert(p);
        }
        let children = observed
            .into_iter()
            .map(|((x, y), sub)| QueryBranch {
                x: self.space.ids()[x as usize].clone(),
                y: Label::from_bool(y == 1),
                node: self.tree(&sub, q - 1, ti),
            })
            .collect();
        QueryNode::Query {
            time: ti,
            interim: LabelVector::from_mask(yhat, g),
            prediction,
            children,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(rows: &[&str], q: u32) -> u32 {
        let p = PatternClass::from_label_rows(rows).unwrap();
        let s = QldSolver::new(&p);
        s.value(&s.full(), q, 0)
    }

    #[test]
    fn constants_pair() {
        assert_eq!(solve(&["0000", "1111"], 0), 2);
        assert_eq!(solve(&["0000", "1111"], 1), 1);
        assert_eq!(solve(&["0000", "1111"], 2), 1);
    }

    #[test]
    fn free_labels_gain_nothing() {
        assert_eq!(solve(&["00", "01", "10", "11"], 0), 2);
        assert_eq!(solve(&["00", "01", "10", "11"], 1), 2);
    }

    #[test]
    fn singleton_is_zero() {
        assert_eq!(solve(&["0110"], 0), 0);
        assert_eq!(solve(&["0110"], 3), 0);
    }

    #[test]
    fn tree_queries_first_round_on_constants() {
        let p = PatternClass::from_label_rows(&["0000", "1111"]).unwrap();
        let s = QldSolver::new(&p);
        let root = s.tree(&s.full(), 1, 0);
        match &root {
            QueryNode::Query { time, children, .. } => {
                assert_eq!(*time, 1);
                assert_eq!(children.len(), 2);
                for c in children {
                    let QueryNode::Blind { suffix, .. } = &c.node else {
                        panic!()
                    };
                    assert!(suffix.0.iter().all(|&l| l == c.y));
                }
            }
            other => panic!("{other:?}"),
        }
        let t = QueryTree {
            budget: 1,
            horizon: 4,
            root,
        };
        assert_eq!(t.query_depths(), (1, 1));
        assert!(t.is_increasing());
    }
}
