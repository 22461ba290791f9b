mod common;

use common::{all_unary, formula_strategy, Space, Unary};
use hylosat::formula::{alpha_eq, is_renamed_apart, normalize_monotone, parse, print, rename_apart, Formula};
use proptest::prelude::*;

fn rich() -> Space {
    Space::new(&all_unary()).svars(3).nominals(2).constants().props(2)
}

fn with_neg() -> impl Strategy<Value = Formula> {
    formula_strategy(&rich(), 5).prop_flat_map(|f| {
        prop_oneof![Just(f.clone()), Just(Formula::neg(f.clone())), Just(Formula::and(Formula::neg(f.clone()), f))]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(f in with_neg()) {
        let text = print(&f);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &f, "{}", text);
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn rename_apart_is_alpha_equivalent(f in formula_strategy(&rich(), 6)) {
        let g = rename_apart(&f);
        prop_assert!(is_renamed_apart(&g));
        prop_assert!(alpha_eq(&f, &g));
        prop_assert_eq!(f.free_svars(), g.free_svars());
        prop_assert_eq!(rename_apart(&g), g.clone());
    }

    #[test]
    fn normalization_keeps_shape(f in formula_strategy(&rich(), 6)) {
        let g = normalize_monotone(&f, false).unwrap();
        prop_assert!(g.is_monotone());
        prop_assert!(g.operators().is_subset(&f.operators()));
        prop_assert!(g.modal_depth() <= f.modal_depth());
    }
}

#[test]
fn non_monotone_is_rejected() {
    let f = parse("<>!p").unwrap();
    assert!(!f.is_monotone());
    assert!(normalize_monotone(&f, false).is_err());
}

#[test]
fn exhaustive_small_round_trip() {
    let space = Space::new(&[Unary::Diamond, Unary::Box, Unary::Down, Unary::AtVar]).svars(2).constants();
    let mut n = 0usize;
    space.for_each(6, &mut |f| {
        n += 1;
        assert_eq!(parse(&print(&f)).unwrap(), f);
    });
    assert!(n > 1000);
}
