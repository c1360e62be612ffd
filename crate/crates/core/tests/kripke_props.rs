mod common;

use modal_workbench::kripke::Model;
use modal_workbench::syntax::Formula;
use modal_workbench::update::translate_pal;
use proptest::prelude::*;

fn worlds(m: &Model) -> Vec<usize> {
    m.worlds().iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_box_is_bounded_iteration(m in common::model(4), f in common::basic()) {
        let n = m.frame().size();
        let plus = m.truth_set(&Formula::box_plus(f.clone()));
        for w in worlds(&m) {
            let iterated = (0..n).all(|k| m.satisfies(w, &Formula::nec_n(k, f.clone())).unwrap());
            prop_assert_eq!(plus.contains(w), iterated);
        }
    }

    #[test]
    fn generated_submodels_preserve_truth(m in common::model(3), f in common::basic()) {
        let plus = Formula::box_plus(f.clone());
        for w in worlds(&m) {
            let g = m.generated_submodel(w).unwrap();
            prop_assert_eq!(m.satisfies(w, &f).unwrap(), g.satisfies(w, &f).unwrap());
            prop_assert_eq!(m.satisfies(w, &plus).unwrap(), g.satisfies(w, &plus).unwrap());
        }
    }

    #[test]
    fn universal_and_existential_are_dual(m in common::model(4), f in common::full()) {
        let e = m.truth_set(&Formula::exist(f.clone()));
        let na = m.worlds().minus(m.truth_set(&Formula::univ(Formula::not(f.clone()))));
        prop_assert_eq!(e, na);
    }

    #[test]
    fn only_picks_at_most_one_world(m in common::model(4), f in common::full()) {
        let o = m.truth_set(&Formula::only(f.clone()));
        prop_assert!(o.len() <= 1);
        prop_assert!(o.is_subset(m.truth_set(&f)));
    }

    #[test]
    fn announcement_and_dynamic_conjunction_agree(m in common::model(4), a in common::full(), b in common::full()) {
        prop_assert_eq!(
            m.truth_set(&Formula::seq(a.clone(), b.clone())),
            m.truth_set(&Formula::announce(a, b))
        );
    }

    #[test]
    fn translation_preserves_truth(m in common::model(4), f in common::dynamic()) {
        prop_assert_eq!(m.truth_set(&f), m.truth_set(&translate_pal(&f)));
    }

    #[test]
    fn relativization_is_truth_in_the_submodel(m in common::model(4), a in common::basic(), b in common::basic()) {
        let rel = m.relativize(&a);
        prop_assert_eq!(rel.truth_set(&b), m.truth_set(&Formula::seq(a, b)));
    }
}
