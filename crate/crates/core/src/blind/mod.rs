//! Exact solvers for discrete blind prediction with a query budget.
//!
//! Rounds are numbered `1..=L`. A blind learner predicts every round from the
//! clock and its past query results alone; a query at round `t` shows it
//! `(x_t, y_t)` after it has predicted there.

mod center;
mod game;
mod patterns;
mod qld;
mod strategy;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

pub use center::{center_branch_and_bound, center_exhaustive, weighted_center, EXHAUSTIVE_LIMIT};
pub use game::InformationModel;
pub use patterns::restrict_patterns;
pub use qld::{QueryBranch, QueryNode, QueryTree};
pub use strategy::{
    play, worst_case_mistakes, BlindStrategy, BpSoa, Decision, FixedVector, Observation,
    ObservationHistory,
};

use crate::error::{Error, Result};
use crate::model::{LabelVector, PatternClass, Validate};
use patterns::Packed;

/// A dimension value with something that attains it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionWitness<W> {
    pub value: u32,
    pub witness: W,
}

fn checked(p: &PatternClass) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyClass);
    }
    p.check()
}

/// `min over ŷ max over label vectors of P |ŷ − y|` on the rounds in
/// `window`. The witness is the lexicographically first optimal `ŷ`.
pub fn blind_learning_dimension(
    p: &PatternClass,
    window: RangeInclusive<usize>,
) -> Result<DimensionWitness<LabelVector>> {
    checked(p)?;
    let (lo, hi) = (*window.start(), *window.end());
    if lo == 0 || hi > p.horizon {
        return Err(Error::InvalidParameter(format!(
            "window {lo}..={hi} outside 1..={}",
            p.horizon
        )));
    }
    let n = (hi + 1).saturating_sub(lo);
    let k = Packed::new(p);
    let rows: Vec<(u64, u32)> = (0..k.len()).map(|i| (k.slice(i, lo - 1, n), 0)).collect();
    let (value, y) = weighted_center(&rows, n);
    Ok(DimensionWitness {
        value,
        witness: LabelVector::from_mask(y, n),
    })
}

/// [`blind_learning_dimension`] over all rounds.
pub fn bld(p: &PatternClass) -> Result<DimensionWitness<LabelVector>> {
    blind_learning_dimension(p, 1..=p.horizon)
}

/// Query learning distance with budget `q`, and the policy tree built from
/// the recursion.
pub fn qld(p: &PatternClass, q: u32) -> Result<DimensionWitness<QueryTree>> {
    checked(p)?;
    let s = qld::QldSolver::new(p);
    let full = s.full();
    Ok(DimensionWitness {
        value: s.value(&full, q, 0),
        witness: QueryTree {
            budget: q,
            horizon: p.horizon,
            root: s.tree(&full, q, 0),
        },
    })
}

/// Value only, skipping the tree.
pub fn qld_value(p: &PatternClass, q: u32) -> Result<u32> {
    checked(p)?;
    let s = qld::QldSolver::new(p);
    Ok(s.value(&s.full(), q, 0))
}

/// Optimal worst-case mistake count of a deterministic blind learner with
/// `q` queries, by exhaustive game search.
pub fn game_value(p: &PatternClass, q: u32) -> Result<u32> {
    game_value_with(p, q, InformationModel::Protocol)
}

pub fn game_value_with(p: &PatternClass, q: u32, model: InformationModel) -> Result<u32> {
    checked(p)?;
    let k = Packed::new(p);
    Ok(game::Game::new(&k).value(q, model))
}

pub fn bp_soa_strategy(p: &PatternClass, q: u32) -> Result<BpSoa> {
    let w = qld(p, q)?;
    Ok(BpSoa {
        space: p.space.clone(),
        tree: w.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(rows: &[&str]) -> PatternClass {
        PatternClass::from_label_rows(rows).unwrap()
    }

    #[test]
    fn bld_examples() {
        let one = bld(&class(&["0110"])).unwrap();
        assert_eq!((one.value, one.witness.to_string()), (0, "0110".into()));

        let pair = bld(&class(&["000", "111"])).unwrap();
        assert_eq!(pair.value, 2);
        assert_eq!(pair.witness.to_string(), "001");

        let rows: Vec<String> = (0..16)
            .map(|m| LabelVector::from_mask(m, 4).to_string())
            .collect();
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        assert_eq!(bld(&class(&refs)).unwrap().value, 4);
    }

    #[test]
    fn bld_window() {
        let p = class(&["0011", "0000"]);
        assert_eq!(blind_learning_dimension(&p, 1..=2).unwrap().value, 0);
        assert_eq!(blind_learning_dimension(&p, 3..=4).unwrap().value, 1);
        assert!(blind_learning_dimension(&p, 0..=2).is_err());
        assert!(blind_learning_dimension(&p, 1..=5).is_err());
    }

    #[test]
    fn empty_class_errors() {
        let mut p = class(&["0"]);
        p.patterns.clear();
        assert!(matches!(bld(&p), Err(Error::EmptyClass)));
        assert!(matches!(qld(&p, 1), Err(Error::EmptyClass)));
        assert!(matches!(game_value(&p, 1), Err(Error::EmptyClass)));
    }

    #[test]
    fn bp_soa_on_constants() {
        let p = class(&["0000", "1111"]);
        let s = bp_soa_strategy(&p, 1).unwrap();
        assert_eq!(worst_case_mistakes(&s, &p, 1).unwrap(), 1);
        for i in 0..2 {
            let (m, queries) = play(&s, &p, i);
            assert!(m <= 1);
            assert_eq!(queries, 1);
        }
        let d = s.decide(&ObservationHistory::default(), 1);
        assert!(d.query);
    }

    #[test]
    fn singleton_never_errs() {
        let p = class(&["10110"]);
        for q in 0..3 {
            let s = bp_soa_strategy(&p, q).unwrap();
            assert_eq!(worst_case_mistakes(&s, &p, q).unwrap(), 0);
            assert_eq!(qld(&p, q).unwrap().value, 0);
            assert_eq!(game_value(&p, q).unwrap(), 0);
        }
    }
}
