use proptest::prelude::*;

use qstream::littlestone::{build_littlestone_tree, ShatteredTree};
use qstream::model::{
    project_labels, ConceptClass, Label, LabelVector, PatternClass, PiecewiseStream,
    QueryBudgetPolicy, Segment, Validate,
};

fn label() -> impl Strategy<Value = Label> {
    any::<bool>().prop_map(Label::from_bool)
}

fn concept_class() -> impl Strategy<Value = ConceptClass> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::btree_set(0u64..1 << n, 1..=(1usize << n).min(12)).prop_map(move |set| {
            let rows: Vec<String> = set
                .iter()
                .map(|&m| LabelVector::from_mask(m, n).to_string())
                .collect();
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            ConceptClass::from_rows((0..n).map(|i| format!("x{i}")), &refs).unwrap()
        })
    })
}

fn pattern_class() -> impl Strategy<Value = PatternClass> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(l, k)| {
        prop::collection::btree_set(prop::collection::vec((0..k, label()), l), 1..=8).prop_map(
            move |rows| {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|&(x, y)| format!("i{x}{y}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
                PatternClass::from_rows((0..k).map(|i| format!("i{i}")), &refs).unwrap()
            },
        )
    })
}

fn stream() -> impl Strategy<Value = PiecewiseStream> {
    prop::collection::vec((1u32..=64, 0usize..3, label()), 1..=10).prop_map(|pieces| {
        let mut t = 0.0;
        let segments = pieces
            .into_iter()
            .map(|(w, x, y)| {
                let start = t;
                t += f64::from(w) / 16.0;
                Segment {
                    start,
                    end: t,
                    x: format!("x{x}"),
                    y,
                }
            })
            .collect();
        PiecewiseStream {
            horizon: t,
            segments,
        }
    })
}

proptest! {
    #[test]
    fn concept_class_round_trips(h in concept_class()) {
        prop_assert!(h.validate().is_empty());
        prop_assert_eq!(ConceptClass::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn pattern_class_round_trips(p in pattern_class()) {
        prop_assert!(p.validate().is_empty());
        prop_assert_eq!(PatternClass::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn stream_round_trips(s in stream()) {
        prop_assert!(s.validate().is_empty());
        prop_assert_eq!(PiecewiseStream::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn budget_round_trips(num in 1u64..100, den in 1u64..100) {
        let b = QueryBudgetPolicy::new(num, den).unwrap();
        let text = serde_json::to_string(&b).unwrap();
        prop_assert_eq!(serde_json::from_str::<QueryBudgetPolicy>(&text).unwrap(), b);
        prop_assert_eq!(b.to_string().parse::<QueryBudgetPolicy>().unwrap(), b);
    }

    #[test]
    fn label_vector_round_trips(m in any::<u64>(), len in 0usize..=64) {
        let m = if len == 64 { m } else { m & ((1u64 << len) - 1) };
        let v = LabelVector::from_mask(m, len);
        prop_assert_eq!(v.to_mask(), m);
        let text = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<LabelVector>(&text).unwrap(), v.clone());
        prop_assert_eq!(v.to_string().parse::<LabelVector>().unwrap(), v);
    }

    #[test]
    fn shattered_tree_round_trips(h in concept_class()) {
        let d = qstream::littlestone::littlestone_dimension(&h).unwrap();
        let t = build_littlestone_tree(&h, d).unwrap().unwrap();
        let text = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<ShatteredTree>(&text).unwrap(), t);
    }

    #[test]
    fn projection_shrinks(p in pattern_class()) {
        let ys = project_labels(&p);
        prop_assert!(ys.len() <= p.patterns.len());
        prop_assert!(ys.iter().all(|y| y.len() == p.horizon));
    }

    #[test]
    fn validate_is_idempotent(s in stream(), cut in 0usize..10, shift in -2.0f64..2.0) {
        // perturb a boundary so some inputs are invalid
        let mut s = s;
        let i = cut % s.segments.len();
        if let Some(g) = s.segments.get_mut(i) {
            g.end += shift;
        }
        let a = s.validate();
        let b = s.validate();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn invalid_values_are_reported_not_panicked() {
    let s = PiecewiseStream {
        horizon: 1.0,
        segments: vec![Segment {
            start: 0.5,
            end: 0.25,
            x: "a".into(),
            y: Label::Zero,
        }],
    };
    assert!(!s.validate().is_empty());
    let nan = PiecewiseStream {
        horizon: f64::NAN,
        segments: vec![],
    };
    assert!(!nan.validate().is_empty());
}
