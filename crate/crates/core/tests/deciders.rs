mod common;

use common::{formula_strategy, Space, Unary};
use hylosat::deciders::{
    bool_transform, decide_nat_logspace, decide_nat_qe, decide_with, route, streaming_residue, verify_witness,
    Options, Route,
};
use hylosat::kripke::sat_search_finite;
use hylosat::{decide, Formula, Frame};
use proptest::prelude::*;

fn np_spaces() -> Vec<Space> {
    use Unary::*;
    vec![
        Space::new(&[Diamond, Box, AtNom]).nominals(2).constants(),
        Space::new(&[Diamond, Down, AtVar]).svars(2).constants(),
        Space::new(&[Diamond, Box, Down]).svars(2).constants(),
        Space::new(&[Diamond, Down, AtVar, AtNom]).svars(1).nominals(1),
    ]
}

#[test]
fn np_agrees_with_qe_on_nat() {
    let mut checked = 0;
    for space in np_spaces() {
        space.for_each(5, &mut |f| {
            if route(&f, Frame::Nat).unwrap() != Route::NpSmallModel {
                return;
            }
            let np = decide(&f, Frame::Nat).unwrap();
            let qe = decide_nat_qe(&f).unwrap();
            assert_eq!(np.status, qe.status, "{f}");
            if np.is_sat() {
                assert!(verify_witness(&f, &np).unwrap(), "{f}");
            }
            checked += 1;
        });
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn lin_search_is_sound_against_finite_chains() {
    for space in np_spaces() {
        space.for_each(5, &mut |f| {
            if route(&f, Frame::Lin).unwrap() != Route::NpSmallModel {
                return;
            }
            let v = decide(&f, Frame::Lin).unwrap();
            if sat_search_finite(&f, 3).is_some() {
                assert!(v.is_sat(), "finite model missed for {f}");
            }
            if v.is_sat() {
                assert!(verify_witness(&f, &v).unwrap(), "{f}");
            }
        });
    }
}

#[test]
fn nat_sat_implies_lin_sat() {
    // Every ℕ-model is a linear order.
    for space in np_spaces() {
        space.for_each(4, &mut |f| {
            if route(&f, Frame::Lin).unwrap() == Route::UnsupportedNonelementary {
                return;
            }
            if decide(&f, Frame::Nat).unwrap().is_sat() {
                assert!(decide(&f, Frame::Lin).unwrap().is_sat(), "{f}");
            }
        });
    }
}

#[test]
fn logspace_agrees_with_qe() {
    let space = Space::new(&[Unary::Box, Unary::Down, Unary::AtVar, Unary::AtNom]).svars(2).nominals(1).constants();
    space.for_each(5, &mut |f| {
        let a = decide_nat_logspace(&f).unwrap();
        let b = decide_nat_qe(&f).unwrap();
        assert_eq!(a.status, b.status, "{f}");
        assert_eq!(
            streaming_residue(&f).unwrap().eval(),
            bool_transform(&f).unwrap().eval(),
            "{f}"
        );
    });
}

fn any_monotone() -> impl Strategy<Value = Formula> {
    use Unary::*;
    let space = Space::new(&[Diamond, Box, Down, AtVar, AtNom]).svars(2).nominals(2).constants();
    formula_strategy(&space, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sat_verdicts_carry_checkable_witnesses(f in any_monotone(), lin in any::<bool>()) {
        let frame = if lin { Frame::Lin } else { Frame::Nat };
        let r = route(&f, frame).unwrap();
        prop_assume!(r != Route::UnsupportedNonelementary);
        let v = decide(&f, frame).unwrap();
        prop_assert_eq!(v.route, r);
        prop_assert_eq!(v.frame, frame);
        if v.is_sat() {
            prop_assert!(verify_witness(&f, &v).unwrap(), "{}", f);
        }
    }

    #[test]
    fn auto_route_agrees_with_qe(f in any_monotone()) {
        let auto = decide(&f, Frame::Nat).unwrap();
        let qe = decide_with(&f, Frame::Nat, Some(Route::NatQe), &Options::default()).unwrap();
        prop_assert_eq!(auto.status, qe.status, "{}", f);
    }

    #[test]
    fn route_depends_only_on_operators(f in any_monotone(), g in any_monotone()) {
        if f.operators() == g.operators() {
            for frame in [Frame::Nat, Frame::Lin] {
                prop_assert_eq!(route(&f, frame).unwrap(), route(&g, frame).unwrap());
            }
        }
    }

    #[test]
    fn decisions_are_deterministic(f in any_monotone()) {
        prop_assume!(route(&f, Frame::Lin).unwrap() != Route::UnsupportedNonelementary);
        prop_assert_eq!(decide(&f, Frame::Lin).unwrap(), decide(&f, Frame::Lin).unwrap());
    }
}

#[test]
fn forced_route_outside_fragment_is_rejected() {
    let f = hylosat::parse("<> #i").unwrap();
    assert!(decide_with(&f, Frame::Nat, Some(Route::NatBoxAt), &Options::default()).is_err());
    assert!(decide_with(&f, Frame::Lin, Some(Route::NatQe), &Options::default()).is_err());
}
