//! Small-instance generators shared by the integration suites.
//!
//! A two-instance pattern of length `l` is packed into `2l` bits, two per
//! round: bit 1 picks the instance (`a` or `b`), bit 0 is the label. Swapping
//! the instance or flipping the label at a fixed round, across all patterns,
//! is XOR with a mask, and those maps preserve every quantity under test.

#![allow(dead_code)]

use qstream::model::PatternClass;
use rand::Rng;

pub fn pattern_class(set: &[u32], l: usize) -> PatternClass {
    let rows: Vec<String> = set
        .iter()
        .map(|&p| {
            (0..l)
                .map(|t| {
                    let s = (p >> (2 * t)) & 3;
                    format!("{}{}", if s & 2 == 0 { "a" } else { "b" }, s & 1)
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    PatternClass::from_rows(["a", "b"], &refs).expect("well-formed rows")
}

/// Is the sorted `set` the least of its translates `set ^ p`, `p` in `set`?
pub fn is_canonical(set: &[u32]) -> bool {
    let mut img = Vec::with_capacity(set.len());
    for &p in &set[1..] {
        img.clear();
        img.extend(set.iter().map(|&q| q ^ p));
        img.sort_unstable();
        if img.as_slice() < set {
            return false;
        }
    }
    true
}

/// One representative per isomorphism class among sets of at most `k`
/// patterns drawn from `universe` (sorted, starting with 0, closed under XOR
/// translates by its own members).
pub fn canonical_sets(universe: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(cur: &mut Vec<u32>, from: usize, universe: &[u32], k: usize, out: &mut Vec<Vec<u32>>) {
        if is_canonical(cur) {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for i in from..universe.len() {
            cur.push(universe[i]);
            rec(cur, i + 1, universe, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], 1, universe, k, &mut out);
    out
}

/// All two-instance patterns of length `l`.
pub fn two_instance_universe(l: usize) -> Vec<u32> {
    (0..1u32 << (2 * l)).collect()
}

/// Patterns of length `l` that only ever show instance `a`.
pub fn one_instance_universe(l: usize) -> Vec<u32> {
    (0..1u32 << l)
        .map(|m| (0..l).map(|t| ((m >> t) & 1) << (2 * t)).sum())
        .collect()
}

/// Random class of `size` distinct patterns, over one or two instances.
pub fn random_set(rng: &mut impl Rng, l: usize, size: usize, two: bool) -> Vec<u32> {
    let universe = if two {
        two_instance_universe(l)
    } else {
        one_instance_universe(l)
    };
    let size = size.min(universe.len());
    let mut picked = rand::seq::index::sample(rng, universe.len(), size)
        .into_iter()
        .map(|i| universe[i])
        .collect::<Vec<_>>();
    picked.sort_unstable();
    picked
}

/// `min over y max over p |y - labels(p)|` by brute force.
pub fn naive_bld(p: &PatternClass) -> u32 {
    let l = p.horizon;
    let rows: Vec<u64> = p.patterns.iter().map(|q| q.labels().to_mask()).collect();
    (0..1u64 << l)
        .map(|y| rows.iter().map(|&r| (r ^ y).count_ones()).max().unwrap())
        .min()
        .unwrap()
}
