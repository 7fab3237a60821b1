//! Littlestone dimension, shattered trees and the Standard Optimal Algorithm.
//!
//! [`LittlestoneSolver`] works on subsets of a fixed class, stored as bitsets
//! over concept indices, and memoizes the dimension of every subset it has
//! seen. The free functions are thin wrappers for one-off use.

use std::collections::HashMap;
use std::sync::RwLock;

use fixedbitset::FixedBitSet;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{ConceptClass, InstanceId, Label};

/// Subset of a class, bit `i` set when concept `i` survives.
pub type ConceptSet = FixedBitSet;

/// Dimension oracle over the subsets of one class. Safe to share between
/// threads; the memo table is behind a lock.
pub struct LittlestoneSolver {
    class: ConceptClass,
    /// `splits[x][y]`: concepts labelling instance `x` with `y`.
    splits: Vec<[FixedBitSet; 2]>,
    memo: RwLock<HashMap<FixedBitSet, u32>>,
}

impl LittlestoneSolver {
    pub fn new(class: &ConceptClass) -> LittlestoneSolver {
        let m = class.len();
        let splits = class
            .space
            .iter()
            .map(|x| {
                let mut s = [FixedBitSet::with_capacity(m), FixedBitSet::with_capacity(m)];
                for (i, h) in class.concepts.iter().enumerate() {
                    s[h.label(x).bit() as usize].insert(i);
                }
                s
            })
            .collect();
        LittlestoneSolver {
            class: class.clone(),
            splits,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    pub fn full(&self) -> ConceptSet {
        let mut s = FixedBitSet::with_capacity(self.class.len());
        s.insert_range(..);
        s
    }

    pub fn restrict_set(&self, s: &ConceptSet, x: InstanceId, y: Label) -> ConceptSet {
        let mut out = s.clone();
        out.intersect_with(&self.splits[x.index()][y.bit() as usize]);
        out
    }

    /// Materializes a subset as a class over the same space.
    pub fn to_class(&self, s: &ConceptSet) -> ConceptClass {
        ConceptClass {
            space: self.class.space.clone(),
            concepts: s.ones().map(|i| self.class.concepts[i].clone()).collect(),
        }
    }

    /// LD of the subset, `None` when it is empty.
    pub fn dimension(&self, s: &ConceptSet) -> Option<u32> {
        if s.is_clear() {
            None
        } else {
            Some(self.ld(s))
        }
    }

    fn ld(&self, s: &ConceptSet) -> u32 {
        let n = s.count_ones(..);
        if n <= 1 {
            return 0;
        }
        if let Some(&v) = self.memo.read().unwrap().get(s) {
            return v;
        }
        // a shattered tree of depth d needs 2^d distinct concepts
        let cap = n.ilog2();
        let mut best = 0;
        for x in self.class.space.iter() {
            let s0 = self.restrict_set(s, x, Label::Zero);
            let c0 = s0.count_ones(..);
            if c0 == 0 || c0 == n {
                continue;
            }
            let s1 = self.restrict_set(s, x, Label::One);
            if c0.ilog2() < best || (n - c0).ilog2() < best {
                continue;
            }
            let a = self.ld(&s0);
            if a < best {
                continue;
            }
            let b = self.ld(&s1);
            best = best.max(1 + a.min(b));
            if best == cap {
                break;
            }
        }
        self.memo.write().unwrap().insert(s.clone(), best);
        best
    }

    /// Score used by SOA: LD of the restriction, −1 when it is empty.
    fn score(&self, s: &ConceptSet, x: InstanceId, y: Label) -> i64 {
        self.dimension(&self.restrict_set(s, x, y))
            .map_or(-1, i64::from)
    }

    /// SOA prediction: the label whose restriction has the larger LD, ties to 0.
    pub fn soa_predict(&self, s: &ConceptSet, x: InstanceId) -> Label {
        if self.score(s, x, Label::One) > self.score(s, x, Label::Zero) {
            Label::One
        } else {
            Label::Zero
        }
    }

    /// A depth-`d` shattered tree for the subset, if LD is at least `d`.
    /// Roots are chosen as the first instance in space order that works.
    pub fn tree(&self, s: &ConceptSet, d: u32) -> Option<ShatteredTree> {
        if s.is_clear() {
            return None;
        }
        if d == 0 {
            return Some(ShatteredTree::Leaf);
        }
        if self.ld(s) < d {
            return None;
        }
        for x in self.class.space.iter() {
            let s0 = self.restrict_set(s, x, Label::Zero);
            let s1 = self.restrict_set(s, x, Label::One);
            if self.dimension(&s0).is_some_and(|v| v + 1 >= d)
                && self.dimension(&s1).is_some_and(|v| v + 1 >= d)
            {
                return Some(ShatteredTree::Node {
                    x: self.class.space.name(x).to_owned(),
                    left: Box::new(self.tree(&s0, d - 1)?),
                    right: Box::new(self.tree(&s1, d - 1)?),
                });
            }
        }
        unreachable!("LD {} >= {d} but no instance splits the class", self.ld(s))
    }
}

/// Perfect binary mistake tree. The left edge carries label 0, the right 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShatteredTree {
    Leaf,
    Node {
        x: String,
        left: Box<ShatteredTree>,
        right: Box<ShatteredTree>,
    },
}

impl ShatteredTree {
    /// Length of the leftmost root-to-leaf path.
    pub fn depth(&self) -> u32 {
        match self {
            ShatteredTree::Leaf => 0,
            ShatteredTree::Node { left, .. } => 1 + left.depth(),
        }
    }

    pub fn is_perfect(&self) -> bool {
        fn go(t: &ShatteredTree) -> Option<u32> {
            match t {
                ShatteredTree::Leaf => Some(0),
                ShatteredTree::Node { left, right, .. } => {
                    let (l, r) = (go(left)?, go(right)?);
                    (l == r).then_some(l + 1)
                }
            }
        }
        go(self).is_some()
    }

    /// The `(x, label)` sequence read off by following `bits` from the root.
    /// Stops early at a leaf.
    pub fn path(&self, bits: &[Label]) -> Vec<(String, Label)> {
        let mut out = Vec::new();
        let mut node = self;
        for &b in bits {
            match node {
                ShatteredTree::Leaf => break,
                ShatteredTree::Node { x, left, right } => {
                    out.push((x.clone(), b));
                    node = if b == Label::Zero { left } else { right };
                }
            }
        }
        out
    }

    /// Every root-to-leaf branch, in left-to-right order.
    pub fn branches(&self) -> Vec<Vec<(String, Label)>> {
        match self {
            ShatteredTree::Leaf => vec![Vec::new()],
            ShatteredTree::Node { x, left, right } => {
                let mut out = Vec::new();
                for (y, sub) in [(Label::Zero, left), (Label::One, right)] {
                    for mut b in sub.branches() {
                        b.insert(0, (x.clone(), y));
                        out.push(b);
                    }
                }
                out
            }
        }
    }
}

impl Serialize for ShatteredTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ShatteredTree::Leaf => s.serialize_none(),
            ShatteredTree::Node { x, left, right } => {
                let mut st = s.serialize_struct("ShatteredTree", 3)?;
                st.serialize_field("x", x)?;
                st.serialize_field("left", left)?;
                st.serialize_field("right", right)?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ShatteredTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Node {
            x: String,
            left: ShatteredTree,
            right: ShatteredTree,
        }
        Ok(match Option::<Node>::deserialize(d)? {
            None => ShatteredTree::Leaf,
            Some(n) => ShatteredTree::Node {
                x: n.x,
                left: Box::new(n.left),
                right: Box::new(n.right),
            },
        })
    }
}

/// Surviving concepts of a run, as a view into a solver's class.
#[derive(Clone)]
pub struct VersionSpace<'s> {
    solver: &'s LittlestoneSolver,
    alive: ConceptSet,
}

impl<'s> VersionSpace<'s> {
    pub fn new(solver: &'s LittlestoneSolver) -> VersionSpace<'s> {
        VersionSpace {
            solver,
            alive: solver.full(),
        }
    }

    pub fn len(&self) -> usize {
        self.alive.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_clear()
    }

    pub fn alive(&self) -> &ConceptSet {
        &self.alive
    }

    pub fn dimension(&self) -> Option<u32> {
        self.solver.dimension(&self.alive)
    }

    pub fn predict(&self, x: InstanceId) -> Label {
        self.solver.soa_predict(&self.alive, x)
    }

    pub fn restricted(&self, x: InstanceId, y: Label) -> VersionSpace<'s> {
        VersionSpace {
            solver: self.solver,
            alive: self.solver.restrict_set(&self.alive, x, y),
        }
    }

    pub fn to_class(&self) -> ConceptClass {
        self.solver.to_class(&self.alive)
    }
}

/// `{h ∈ H : h(x) = y}`. The result may be empty.
pub fn restrict(h: &ConceptClass, x: &str, y: Label) -> Result<ConceptClass> {
    let id = h.space.require(x)?;
    Ok(ConceptClass {
        space: h.space.clone(),
        concepts: h
            .concepts
            .iter()
            .filter(|c| c.label(id) == y)
            .cloned()
            .collect(),
    })
}

pub fn littlestone_dimension(h: &ConceptClass) -> Result<u32> {
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    Ok(solver.ld(&solver.full()))
}

/// A depth-`d` shattered tree, or `None` when `LD(h) < d`.
pub fn build_littlestone_tree(h: &ConceptClass, d: u32) -> Result<Option<ShatteredTree>> {
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    Ok(solver.tree(&solver.full(), d))
}

pub fn soa_predict(v: &ConceptClass, x: &str) -> Result<Label> {
    if v.is_empty() {
        return Err(Error::EmptyClass);
    }
    let id = v.space.require(x)?;
    let solver = LittlestoneSolver::new(v);
    Ok(solver.soa_predict(&solver.full(), id))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoaRun {
    pub mistakes: usize,
    pub mistake_indices: Vec<usize>,
    pub version_space: ConceptClass,
}

/// Plays SOA over `seq`, restricting after every pair.
pub fn soa_run(h: &ConceptClass, seq: &[(String, Label)]) -> Result<SoaRun> {
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    soa_run_with(&solver, seq)
}

/// [`soa_run`] reusing an existing solver's memo.
pub fn soa_run_with(solver: &LittlestoneSolver, seq: &[(String, Label)]) -> Result<SoaRun> {
    let mut v = VersionSpace::new(solver);
    let mut mistake_indices = Vec::new();
    for (i, (x, y)) in seq.iter().enumerate() {
        let id = solver.class().space.require(x)?;
        if v.predict(id) != *y {
            mistake_indices.push(i);
        }
        v = v.restricted(id, *y);
        if v.is_empty() {
            return Err(Error::NotRealizable(format!(
                "step {i}: no concept labels {x:?} with {y}"
            )));
        }
    }
    Ok(SoaRun {
        mistakes: mistake_indices.len(),
        mistake_indices,
        version_space: v.to_class(),
    })
}
