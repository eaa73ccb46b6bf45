use mono_core::colourings::{
    congruence_colouring, extremal_colouring, extremal_thresholds, lift_colouring, random_colouring, LiftMode,
};
use mono_core::search::{config_to_bad_solution, hindman_search};
use mono_core::{Colouring, Error};
use proptest::prelude::*;

proptest! {
    #[test]
    fn extremal_classes_are_consecutive_intervals(n in 2u64..1_000_000, r in 1u32..7) {
        let t = extremal_thresholds(n, r);
        prop_assert!(t.windows(2).all(|w| w[1] <= w[0]));
        if n <= 20_000 {
            let c = extremal_colouring(n, r).unwrap();
            let sizes: u64 = c.class_sizes().iter().sum();
            prop_assert_eq!(sizes, n);
            // colours never increase with x
            prop_assert!(c.assignment().windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn random_is_seeded_and_in_range(n in 1u64..2000, r in 1u32..9, seed in any::<u64>()) {
        let a = random_colouring(n, r, seed).unwrap();
        prop_assert_eq!(&a, &random_colouring(n, r, seed).unwrap());
        prop_assert!(a.assignment().iter().all(|&c| (1..=r).contains(&c)));
    }

    #[test]
    fn text_round_trip(n in 1u64..500, r in 1u32..6, seed in any::<u64>()) {
        let c = random_colouring(n, r, seed).unwrap();
        prop_assert_eq!(Colouring::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn halving_lift_semantics(n in 1u64..300, r in 1u32..5, seed in any::<u64>()) {
        let c = random_colouring(n, r, seed).unwrap();
        let l = lift_colouring(&c, LiftMode::Halving, None).unwrap();
        prop_assert_eq!(l.n(), 2 * n);
        prop_assert_eq!(l.r(), r + 1);
        for m in 1..=2 * n {
            let expected = if m % 2 == 1 { r + 1 } else { c.colour(m / 2) };
            prop_assert_eq!(l.colour(m), expected);
        }
    }

    #[test]
    fn lifted_configurations_give_solutions(n in 20u64..200, r in 1u32..4, seed in any::<u64>()) {
        let c = random_colouring(n, r, seed).unwrap();
        let l = lift_colouring(&c, LiftMode::Halving, None).unwrap();
        for cfg in hindman_search(&l, 2 * n).unwrap() {
            prop_assert!(config_to_bad_solution(&cfg).unwrap().holds());
        }
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    let c = random_colouring(10, 3, 7).unwrap();
    c.save(&path).unwrap();
    assert_eq!(Colouring::load(&path).unwrap(), c);

    std::fs::write(&path, "3 2\n1\n0\n2\n").unwrap();
    assert!(matches!(Colouring::load(&path), Err(Error::Parse { line: 3, .. })));
}

#[test]
fn modular_lift_examples() {
    let parity = congruence_colouring(10, 2).unwrap();
    let l = lift_colouring(&parity, LiftMode::Modular { a: 2, b: 1 }, None).unwrap();
    assert_eq!(l.colour(4), parity.colour(2));
    let l = lift_colouring(&parity, LiftMode::Modular { a: 3, b: 1 }, None).unwrap();
    assert_eq!(l.colour(5), parity.r() + 2);
    let err = lift_colouring(&parity, LiftMode::Modular { a: 1, b: 2 }, Some(10)).unwrap_err();
    assert!(matches!(err, Error::Domain { m: 6, .. }));
}
