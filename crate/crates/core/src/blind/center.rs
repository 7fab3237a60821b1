//! Weighted Hamming 1-center over short binary vectors.
//!
//! Given rows `(v_i, w_i)` of width `n`, finds `ŷ` minimizing
//! `max_i (w_i + |ŷ − v_i|)`. Vectors are bit masks, position `j` at bit `j`.
//! Among optimal `ŷ` the lexicographically smallest (position 0 first,
//! 0 before 1) is returned.

/// Widths up to this are solved by plain enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 20;

pub fn weighted_center(rows: &[(u64, u32)], n: usize) -> (u32, u64) {
    let rows = dedup(rows);
    if n <= EXHAUSTIVE_LIMIT {
        center_exhaustive(&rows, n)
    } else {
        center_branch_and_bound(&rows, n)
    }
}

/// Same vector twice: only the heavier copy matters.
fn dedup(rows: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut v = rows.to_vec();
    v.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    v.dedup_by_key(|r| r.0);
    v
}

/// `c`-th vector in lexicographic order, as a mask.
fn lex(c: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        c.reverse_bits() >> (64 - n)
    }
}

pub fn center_exhaustive(rows: &[(u64, u32)], n: usize) -> (u32, u64) {
    assert!(n < 64);
    let floor = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let mut best = (u32::MAX, 0);
    for c in 0..1u64 << n {
        let y = lex(c, n);
        let mut worst = 0;
        for &(v, w) in rows {
            worst = worst.max(w + (y ^ v).count_ones());
            if worst >= best.0 {
                break;
            }
        }
        if worst < best.0 {
            best = (worst, y);
            if worst == floor {
                break;
            }
        }
    }
    best
}

/// Depth-first over positions 0..n, trying 0 before 1. The bound at a node
/// is the larger of the worst partial cost and, for every pair of rows,
/// half their combined partial cost plus the remaining positions where they
/// differ (one of the two must pay for each).
pub fn center_branch_and_bound(rows: &[(u64, u32)], n: usize) -> (u32, u64) {
    assert!(n <= 64);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // incumbent: first row's own vector, strictly beaten by anything recorded
    let seed = rows
        .first()
        .map(|&(v0, _)| {
            rows.iter()
                .map(|&(v, w)| w + (v ^ v0).count_ones())
                .max()
                .unwrap()
        })
        .unwrap_or(0);
    let mut st = Bnb {
        rows,
        n,
        full,
        bound: seed + 1,
        best: 0,
        cost: rows.iter().map(|r| r.1).collect(),
    };
    st.go(0, 0);
    (st.bound, st.best)
}

struct Bnb<'a> {
    rows: &'a [(u64, u32)],
    n: usize,
    full: u64,
    bound: u32,
    best: u64,
    cost: Vec<u32>,
}

impl Bnb<'_> {
    fn lower_bound(&self, pos: usize) -> u32 {
        let rest = if pos >= 64 {
            0
        } else {
            self.full & !((1u64 << pos) - 1)
        };
        let mut lb = self.cost.iter().copied().max().unwrap_or(0);
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                let d = ((self.rows[i].0 ^ self.rows[j].0) & rest).count_ones();
                lb = lb.max((self.cost[i] + self.cost[j] + d).div_ceil(2));
            }
        }
        lb
    }

    fn go(&mut self, pos: usize, y: u64) {
        if self.lower_bound(pos) >= self.bound {
            return;
        }
        if pos == self.n {
            self.bound = self.cost.iter().copied().max().unwrap_or(0);
            self.best = y;
            return;
        }
        for bit in [0u64, 1] {
            let saved = self.cost.clone();
            for (c, &(v, _)) in self.cost.iter_mut().zip(self.rows) {
                *c += ((v >> pos & 1) != bit) as u32;
            }
            self.go(pos + 1, y | bit << pos);
            self.cost = saved;
        }
    }
}
