mod common;

use proptest::prelude::*;

use qstream::blind::{
    bld, blind_learning_dimension, bp_soa_strategy, center_branch_and_bound, center_exhaustive,
    game_value, qld, qld_value, worst_case_mistakes, FixedVector,
};
use qstream::model::PatternClass;

use common::*;

fn set_strategy() -> impl Strategy<Value = (Vec<u32>, usize)> {
    (1usize..=5, any::<bool>()).prop_flat_map(|(l, two)| {
        let universe = if two {
            two_instance_universe(l)
        } else {
            one_instance_universe(l)
        };
        let max = universe.len().min(10);
        prop::sample::subsequence(universe, 1..=max).prop_map(move |s| (s, l))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn qld_bounds_and_budget_monotone((set, l) in set_strategy()) {
        let p = pattern_class(&set, l);
        let mut prev = u32::MAX;
        for q in 0..=l as u32 + 1 {
            let v = qld_value(&p, q).unwrap();
            prop_assert!(v as usize <= l);
            prop_assert!(v <= prev);
            prev = v;
        }
        prop_assert_eq!(qld_value(&p, 0).unwrap(), bld(&p).unwrap().value);
    }

    #[test]
    fn game_value_budget_monotone((set, l) in set_strategy()) {
        let p = pattern_class(&set, l);
        let mut prev = u32::MAX;
        for q in 0..=2 {
            let g = game_value(&p, q).unwrap();
            prop_assert!(g <= prev);
            prev = g;
        }
        prop_assert_eq!(game_value(&p, 0).unwrap(), bld(&p).unwrap().value);
    }

    #[test]
    fn bld_witness_replays_exactly((set, l) in set_strategy()) {
        let p = pattern_class(&set, l);
        let w = bld(&p).unwrap();
        prop_assert_eq!(w.witness.len(), l);
        prop_assert_eq!(worst_case_mistakes(&FixedVector(w.witness), &p, 0).unwrap(), w.value);
        prop_assert_eq!(w.value, naive_bld(&p));
    }

    #[test]
    fn bld_ignores_order_and_instance_names((set, l) in set_strategy(), rot in 0usize..10) {
        let p = pattern_class(&set, l);
        let mut q = p.clone();
        let k = rot % q.patterns.len();
        q.patterns.rotate_left(k);
        prop_assert_eq!(bld(&q).unwrap().value, bld(&p).unwrap().value);
        let mut renamed = p.clone();
        renamed.space = qstream::model::InstanceSpace::new(["zz", "yy"]);
        prop_assert_eq!(bld(&renamed).unwrap().value, bld(&p).unwrap().value);
    }

    #[test]
    fn windows_never_exceed_full((set, l) in set_strategy(), a in 0usize..5, b in 0usize..5) {
        let p = pattern_class(&set, l);
        let (lo, hi) = (1 + a.min(b) % l, 1 + a.max(b) % l);
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let w = blind_learning_dimension(&p, lo..=hi).unwrap();
        prop_assert!(w.value <= bld(&p).unwrap().value);
        prop_assert_eq!(w.witness.len(), hi - lo + 1);
    }

    #[test]
    fn bp_soa_never_beats_game((set, l) in set_strategy(), q in 0u32..=2) {
        let p = pattern_class(&set, l);
        let w = worst_case_mistakes(&bp_soa_strategy(&p, q).unwrap(), &p, q).unwrap();
        prop_assert!(w >= game_value(&p, q).unwrap());
        prop_assert!(w as usize <= l);
    }

    #[test]
    fn qld_tree_respects_budget((set, l) in set_strategy(), q in 0u32..=3) {
        let p = pattern_class(&set, l);
        let t = qld(&p, q).unwrap();
        prop_assert!(t.witness.is_increasing());
        let (lo, hi) = t.witness.query_depths();
        prop_assert!(lo <= hi && hi <= (q as usize).min(l));
        let text = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<qstream::blind::DimensionWitness<qstream::blind::QueryTree>>(&text).unwrap(), t);
    }

    #[test]
    fn center_routes_agree(rows in prop::collection::vec((any::<u64>(), 0u32..3), 1..8), n in 1usize..=14) {
        let mask = (1u64 << n) - 1;
        let rows: Vec<(u64, u32)> = rows.into_iter().map(|(r, w)| (r & mask, w)).collect();
        prop_assert_eq!(center_exhaustive(&rows, n), center_branch_and_bound(&rows, n));
    }
}

/// Class monotonicity, exhaustively over one-instance classes with L ≤ 4 and
/// two-instance classes with L ≤ 2, |P| ≤ 8. Removing one pattern at a time
/// covers every subset pair by transitivity.
#[test]
fn qld_monotone_in_class() {
    let mut families = Vec::new();
    for l in 1..=4 {
        families.push((canonical_sets(&one_instance_universe(l), 8), l));
    }
    for l in 1..=2 {
        families.push((canonical_sets(&two_instance_universe(l), 8), l));
    }
    let mut pairs = 0;
    for (sets, l) in families {
        for set in sets {
            let p = pattern_class(&set, l);
            let full: Vec<u32> = (0..=2).map(|q| qld_value(&p, q).unwrap()).collect();
            for drop in 0..set.len() {
                if set.len() == 1 {
                    break;
                }
                let mut sub = set.clone();
                sub.remove(drop);
                let ps = pattern_class(&sub, l);
                for q in 0..=2u32 {
                    pairs += 1;
                    assert!(
                        qld_value(&ps, q).unwrap() <= full[q as usize],
                        "{sub:?} ⊂ {set:?}, L={l}, Q={q}"
                    );
                }
            }
        }
    }
    assert!(pairs > 10_000);
}

#[test]
fn empty_and_bad_windows_are_errors() {
    let p = PatternClass::from_label_rows(&["01", "10"]).unwrap();
    assert!(blind_learning_dimension(&p, 0..=1).is_err());
    assert!(blind_learning_dimension(&p, 1..=3).is_err());
    let mut empty = p.clone();
    empty.patterns.clear();
    assert!(qld(&empty, 1).is_err());
    assert!(game_value(&empty, 1).is_err());
}
