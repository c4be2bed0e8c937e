mod common;

use common::{random_translation, random_zs};
use gpdkit_core::construct::{orbit_groupoid_left, zs_product_left};
use gpdkit_core::dr::{check_star_commuting, dr_freeness, StarCommutingSystem};
use gpdkit_core::dsl::{self, groupoid_block, left_action_block, Document};
use gpdkit_core::equiv::{one_sided_equivalence, verify_equivalence};
use gpdkit_core::ssa::{
    check_left_axioms, check_right_axioms, counting_haar_invariance, counting_haar_invariance_right, is_free, verify_derived_left_laws,
    verify_derived_right_laws,
};
use gpdkit_core::{iso_check, LeftAction, RightAction};
use proptest::prelude::*;

fn laws_hold(a: &LeftAction) -> Result<(), TestCaseError> {
    let rep = check_left_axioms(a);
    prop_assert!(rep.is_ok(), "axioms: {rep}");
    let rep = verify_derived_left_laws(a);
    prop_assert!(rep.is_ok(), "L7-L10: {rep}");
    let r = RightAction::mirror(a).expect("mirror of a valid action");
    let rep = check_right_axioms(&r);
    prop_assert!(rep.is_ok(), "mirrored axioms: {rep}");
    let rep = verify_derived_right_laws(&r);
    prop_assert!(rep.is_ok(), "R7-R10: {rep}");
    let rep = counting_haar_invariance(a);
    prop_assert!(rep.is_ok(), "haar: {rep}");
    Ok(())
}

fn quotients_hold(a: &LeftAction) -> Result<(), TestCaseError> {
    if !is_free(a).free {
        return Ok(());
    }
    let o = orbit_groupoid_left(a).expect("free action has an orbit groupoid");
    prop_assert!(o.report.is_ok(), "representative independence: {}", o.report);
    let w = one_sided_equivalence(a.clone()).expect("free action gives an equivalence");
    let rep = verify_equivalence(&w);
    prop_assert!(rep.is_ok(), "{rep}");
    let rep = counting_haar_invariance(&w.ql.action);
    prop_assert!(rep.is_ok(), "haar on X/G: {rep}");
    let rep = counting_haar_invariance_right(&w.qr.action);
    prop_assert!(rep.is_ok(), "haar on H\\X: {rep}");
    Ok(())
}

fn action_document(a: &LeftAction) -> Document {
    Document {
        blocks: vec![groupoid_block("H", &a.h), groupoid_block("X", &a.x), left_action_block("A", "H", "X", a)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn random_zs_actions_satisfy_the_laws(seed in any::<u64>()) {
        let fx = random_zs(seed);
        laws_hold(&fx.action)?;
        quotients_hold(&fx.action)?;
    }

    #[test]
    fn random_zs_products_match_k_ltimes_y(seed in any::<u64>()) {
        let fx = random_zs(seed);
        let p = zs_product_left(&fx.action).unwrap();
        prop_assert!(fx.phi(&p).is_some());
    }

    #[test]
    fn random_translations_satisfy_the_laws(seed in any::<u64>()) {
        let a = random_translation(seed);
        laws_hold(&a)?;
        quotients_hold(&a)?;
    }

    #[test]
    fn trivial_products_are_isomorphic_to_the_base(seed in any::<u64>()) {
        let x = random_translation(seed).x;
        for a in [LeftAction::unit_space(x.clone()), LeftAction::trivial_group(x.clone())] {
            let p = zs_product_left(&a).unwrap();
            prop_assert!(iso_check(&p.base, &x).is_some());
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let a = random_translation(seed);
        let doc = action_document(&a);
        let back = dsl::parse(&dsl::print(&doc)).unwrap();
        prop_assert_eq!(&back, &doc);
        let m = dsl::elaborate(&back).unwrap();
        prop_assert_eq!(&m.left_actions["A"].action, &a);
    }

    #[test]
    fn translation_systems_have_period_lcm(n in 2usize..12, a in 0usize..12, b in 0usize..12) {
        let sys = StarCommutingSystem::new(n, (0..n).map(|x| (x + a) % n).collect(), (0..n).map(|x| (x + b) % n).collect()).unwrap();
        prop_assert!(check_star_commuting(&sys).is_ok());
        // Order of x -> x + b on Z/n by iteration.
        let order = (1..=n).find(|k| (k * b) % n == 0).unwrap();
        let f = dr_freeness(&sys, order).unwrap();
        prop_assert_eq!(f.k, order);
        prop_assert!(f.report.is_ok(), "{}", f.report);
    }
}
