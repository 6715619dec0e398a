use hellylab::concept_class::{generate_class, ClassFamily, ConceptClass, LabeledSample};
use hellylab::learners::{
    agreement_region, algorithm_a, algorithm_a_erm, erm, majority_label, project,
    HypothesisMultiset,
};
use hellylab::parameters::{dual_helly_number, SearchCaps};
use hellylab::Error;
use proptest::prelude::*;

fn zoo() -> Vec<ConceptClass> {
    [
        ClassFamily::Thresholds {
            grid: (1..=8).map(f64::from).collect(),
            augment_all_negative: true,
        },
        ClassFamily::Intervals {
            grid: (1..=6).map(f64::from).collect(),
            include_empty: true,
        },
        ClassFamily::Hard { d: 2, k_w: 5 },
        ClassFamily::Singletons {
            n: 7,
            augment_all_negative: false,
        },
    ]
    .iter()
    .map(|f| generate_class(f).unwrap())
    .collect()
}

fn k_of(class: &ConceptClass) -> usize {
    dual_helly_number(class, &SearchCaps::default())
        .unwrap()
        .max(2)
}

fn labeled(class: &ConceptClass, target: usize, raw: &[usize]) -> LabeledSample {
    let pts: Vec<usize> = raw.iter().map(|p| p % class.domain_size()).collect();
    LabeledSample::labeled_by(class, target % class.len(), &pts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algorithm_a_is_correct_on_t(
        ci in 0usize..4,
        target in any::<usize>(),
        s in prop::collection::vec(any::<usize>(), 0..30),
        t in prop::collection::vec(any::<usize>(), 0..4),
        seed in any::<u64>(),
    ) {
        let class = &zoo()[ci];
        let (s, t) = (labeled(class, target, &s), labeled(class, target, &t));
        let h = algorithm_a(class, &s, &t, k_of(class), seed).unwrap();
        prop_assert!(class.agrees(h, &t));
        prop_assert_eq!(h, algorithm_a(class, &s, &t, k_of(class), seed).unwrap());
    }

    #[test]
    fn algorithm_a_erm_is_consistent(
        ci in 0usize..4,
        target in any::<usize>(),
        s in prop::collection::vec(any::<usize>(), 0..18),
    ) {
        let class = &zoo()[ci];
        let s = labeled(class, target, &s);
        let h = algorithm_a_erm(class, &s, k_of(class)).unwrap();
        prop_assert!(class.agrees(h, &s));
    }

    #[test]
    fn projection_follows_confident_majority(
        ci in 0usize..4,
        members in prop::collection::vec(any::<usize>(), 1..12),
    ) {
        let class = &zoo()[ci];
        let k = k_of(class);
        let entries: Vec<usize> = members.iter().map(|m| m % class.len()).collect();
        let ms = HypothesisMultiset::new(class, entries).unwrap();
        let h = project(class, &ms, k).unwrap();
        for x in agreement_region(class, &ms, k).unwrap() {
            prop_assert_eq!(Some(class.predict(h, x)), majority_label(class, &ms, x).label());
        }
    }

    #[test]
    fn erm_is_lowest_consistent(
        ci in 0usize..4,
        target in any::<usize>(),
        s in prop::collection::vec(any::<usize>(), 0..12),
    ) {
        let class = &zoo()[ci];
        let s = labeled(class, target, &s);
        let h = erm(class, &s).unwrap();
        prop_assert!(class.agrees(h, &s));
        prop_assert!((0..h).all(|g| !class.agrees(g, &s)));
    }
}

#[test]
fn unrealizable_input_is_reported() {
    let class = &zoo()[0];
    let bad = LabeledSample::from_pairs(&[(2, 1), (2, -1)]).unwrap();
    assert!(matches!(erm(class, &bad), Err(Error::Unrealizable)));
    assert!(matches!(
        algorithm_a_erm(class, &bad, 2),
        Err(Error::Unrealizable)
    ));
    assert!(algorithm_a(class, &LabeledSample::empty(), &bad, 2, 0).is_err());
}

#[test]
fn seeds_change_only_internal_randomness() {
    // Any seed must still produce a correct hypothesis on T.
    let class = &zoo()[2];
    let pts: Vec<usize> = (0..40).map(|i| (i * 7) % class.domain_size()).collect();
    let s = LabeledSample::labeled_by(class, 3, &pts);
    let t = LabeledSample::labeled_by(class, 3, &pts[..3]);
    for seed in 0..20 {
        let h = algorithm_a(class, &s, &t, k_of(class), seed).unwrap();
        assert!(class.agrees(h, &t));
    }
}
