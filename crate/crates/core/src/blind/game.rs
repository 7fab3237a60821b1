//! Exhaustive minimax value of the query-bounded blind prediction game.
//!
//! Written independently of the recursion in `qld`: states carry the
//! mistakes already charged to each pattern, the learner's options are
//! enumerated literally (stop querying, or pick the next query time, every
//! interim prediction and the prediction at the query round), and the
//! terminal payoff is computed by enumerating blind vectors directly.

use std::collections::{BTreeMap, HashMap};

use super::patterns::Packed;

/// What the learner knows when it must predict at a query round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InformationModel {
    /// Rounds are blind: the prediction at a query round is committed before
    /// that round's instance is shown, and labels of unqueried rounds are
    /// never revealed.
    #[default]
    Protocol,
    /// Querying at `t` also reveals the labels of the rounds since the last
    /// query and shows `x_t` before the learner predicts at `t`.
    RevealedPrefix,
}

type State = Vec<(u32, u32)>;

pub(crate) struct Game<'a> {
    k: &'a Packed,
    memo: HashMap<(State, u32, usize), u32>,
    revealed_memo: HashMap<(Vec<u32>, u32, usize), u32>,
}

impl<'a> Game<'a> {
    pub fn new(k: &'a Packed) -> Game<'a> {
        Game {
            k,
            memo: HashMap::new(),
            revealed_memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, q: u32, model: InformationModel) -> u32 {
        let all: Vec<u32> = (0..self.k.len() as u32).collect();
        match model {
            InformationModel::Protocol => {
                self.protocol(all.iter().map(|&p| (p, 0)).collect(), q, 0)
            }
            InformationModel::RevealedPrefix => self.revealed(all, q, 0),
        }
    }

    /// `min over ŷ of max over p (w_p + mistakes of ŷ on p after tp)`.
    fn blind_payoff(&self, state: &State, tp: usize) -> u32 {
        let n = self.k.horizon - tp;
        let mut best = u32::MAX;
        for yhat in 0..1u64 << n {
            let mut worst = 0;
            for &(p, w) in state {
                let mut m = w;
                for j in 0..n {
                    if (yhat >> j & 1) != self.k.label(p as usize, tp + 1 + j) {
                        m += 1;
                    }
                }
                worst = worst.max(m);
            }
            best = best.min(worst);
        }
        best
    }

    fn protocol(&mut self, mut state: State, q: u32, tp: usize) -> u32 {
        let base = state.iter().map(|s| s.1).min().unwrap();
        for s in &mut state {
            s.1 -= base;
        }
        let key = (state, q, tp);
        if let Some(&v) = self.memo.get(&key) {
            return base + v;
        }
        let (state, _, _) = &key;
        let state = state.clone();
        // whatever happens, some pattern already carries the heaviest charge
        let floor = state.iter().map(|s| s.1).max().unwrap();
        let mut best = self.blind_payoff(&state, tp);
        if q > 0 {
            'time: for ti in tp + 1..=self.k.horizon {
                let gap = ti - tp - 1;
                for interim in 0..1u64 << gap {
                    for r in 0..2u64 {
                        if best == floor {
                            break 'time;
                        }
                        // what the learner sees: the pair at ti
                        let mut seen: BTreeMap<(u32, u64), State> = BTreeMap::new();
                        for &(p, w) in &state {
                            let pu = p as usize;
                            let mut w = w;
                            for j in 0..gap {
                                if (interim >> j & 1) != self.k.label(pu, tp + 1 + j) {
                                    w += 1;
                                }
                            }
                            let y = self.k.label(pu, ti);
                            if r != y {
                                w += 1;
                            }
                            seen.entry((self.k.xs[pu][ti - 1], y))
                                .or_default()
                                .push((p, w));
                        }
                        let mut worst = 0;
                        for child in seen.into_values() {
                            let heaviest = child.iter().map(|s| s.1).max().unwrap();
                            if heaviest >= best {
                                worst = heaviest;
                                break;
                            }
                            worst = worst.max(self.protocol(child, q - 1, ti));
                            if worst >= best {
                                break;
                            }
                        }
                        best = best.min(worst);
                    }
                }
            }
        }
        self.memo.insert(key, best);
        base + best
    }

    fn revealed(&mut self, set: Vec<u32>, q: u32, tp: usize) -> u32 {
        let key = (set, q, tp);
        if let Some(&v) = self.revealed_memo.get(&key) {
            return v;
        }
        let set = key.0.clone();
        let unweighted: State = set.iter().map(|&p| (p, 0)).collect();
        let mut best = self.blind_payoff(&unweighted, tp);
        if q > 0 {
            for ti in tp + 1..=self.k.horizon {
                let gap = ti - tp - 1;
                // (interim labels, x at ti) -> patterns by label at ti
                let mut seen: BTreeMap<(u64, u32), [Vec<u32>; 2]> = BTreeMap::new();
                for &p in &set {
                    let pu = p as usize;
                    let prefix = self.k.slice(pu, tp, gap);
                    seen.entry((prefix, self.k.xs[pu][ti - 1])).or_default()
                        [self.k.label(pu, ti) as usize]
                        .push(p);
                }
                let mut after: Vec<(u64, u32)> = Vec::new();
                for ((prefix, _), split) in seen {
                    let sub: Vec<Option<u32>> = split
                        .into_iter()
                        .map(|s| (!s.is_empty()).then(|| self.revealed(s, q - 1, ti)))
                        .collect();
                    let cost = (0..2)
                        .map(|r| {
                            (0..2)
                                .filter_map(|b| sub[b].map(|v| v + u32::from(r != b)))
                                .max()
                                .unwrap()
                        })
                        .min()
                        .unwrap();
                    after.push((prefix, cost));
                }
                for interim in 0..1u64 << gap {
                    let worst = after
                        .iter()
                        .map(|&(prefix, c)| (prefix ^ interim).count_ones() + c)
                        .max()
                        .unwrap();
                    best = best.min(worst);
                }
            }
        }
        self.revealed_memo.insert(key, best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PatternClass;

    fn game(rows: &[&str], q: u32, model: InformationModel) -> u32 {
        let p = PatternClass::from_label_rows(rows).unwrap();
        let k = Packed::new(&p);
        Game::new(&k).value(q, model)
    }

    #[test]
    fn small_values() {
        for model in [InformationModel::Protocol, InformationModel::RevealedPrefix] {
            assert_eq!(game(&["0110"], 2, model), 0);
            assert_eq!(game(&["0000", "1111"], 0, model), 2);
            assert_eq!(game(&["0000", "1111"], 1, model), 1);
            assert_eq!(game(&["0000", "1111"], 2, model), 1);
            assert_eq!(game(&["00", "01", "10", "11"], 1, model), 2);
        }
    }

    #[test]
    fn hidden_interim_labels_cost_a_mistake() {
        let p = PatternClass::from_rows(
            ["a", "b"],
            &["a0 a0", "a0 a1", "a1 a0", "b1 a0", "b1 a1", "b0 a0"],
        )
        .unwrap();
        let k = Packed::new(&p);
        assert_eq!(Game::new(&k).value(1, InformationModel::Protocol), 2);
        assert_eq!(Game::new(&k).value(1, InformationModel::RevealedPrefix), 1);
    }
}
