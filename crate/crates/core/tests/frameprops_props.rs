mod common;

use modal_workbench::frameprops::{general_condition, has_global_property, in_class, FrameClass, GlobalProperty};
use modal_workbench::kripke::{Frame, Model};
use modal_workbench::syntax::Formula;
use proptest::prelude::*;

/// Global validity of `<>^i []^j p / []^k <>^l p` by sweeping every valuation of `p`.
fn brute(fr: &Frame, (i, j, k, l): (usize, usize, usize, usize)) -> bool {
    let p = Formula::atom("p");
    let prem = Formula::poss_n(i, Formula::nec_n(j, p.clone()));
    let concl = Formula::nec_n(k, Formula::poss_n(l, p));
    fr.worlds().subsets().all(|s| {
        let m = Model::new(*fr, [("p".to_string(), s)].into_iter().collect()).unwrap();
        !m.globally_true(&prem) || m.globally_true(&concl)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn named_properties_match_their_instances(fr in common::frame(4)) {
        for prop in GlobalProperty::NAMED {
            let (i, j, k, l) = prop.exponents();
            let first_order = has_global_property(&fr, prop);
            prop_assert_eq!(first_order, general_condition(&fr, i, j, k, l), "{}", prop.name());
            prop_assert_eq!(first_order, brute(&fr, (i, j, k, l)), "{}", prop.name());
        }
    }

    #[test]
    fn general_condition_is_validity(fr in common::frame(3), e in (0..=3usize, 0..=3usize, 0..=3usize, 0..=3usize)) {
        prop_assert_eq!(general_condition(&fr, e.0, e.1, e.2, e.3), brute(&fr, e));
    }

    #[test]
    fn phi_to_box_condition_is_universal(fr in common::frame(4)) {
        prop_assert!(general_condition(&fr, 0, 0, 1, 0));
    }

    #[test]
    fn class_inclusions(fr in common::frame(4)) {
        if in_class(&fr, &FrameClass::S5) {
            prop_assert!(in_class(&fr, &FrameClass::S4));
        }
        if in_class(&fr, &FrameClass::S4) {
            prop_assert!(in_class(&fr, &FrameClass::K4));
        }
        if in_class(&fr, &FrameClass::KD45) {
            prop_assert!(in_class(&fr, &FrameClass::K45));
        }
        prop_assert!(in_class(&fr, &FrameClass::K));
    }
}
