mod common;

use common::*;
use intdyn::{ExactMap, Interval};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn image_and_preimage_are_sound(f in pl_map(), parts in interval_list(), x in rational01(97)) {
        image_preimage_sound(&f, &parts, &x)?;
    }
}

proptest! {
    #[test]
    fn doubling_is_a_conjugacy(g in pl_map(), x in rational01(210)) {
        doubling_conjugacy(&g, &x)?;
    }

    #[test]
    fn interval_sets_have_a_normal_form(a in interval_list(), b in interval_list(), x in rational01(60)) {
        normal_form(&a, &b, &x)?;
    }

    #[test]
    fn subcover_counts_are_submultiplicative(f in pl_map(), u in two_set_cover(), v in two_set_cover()) {
        submultiplicative(&f, &u, &v)?;
    }

    #[test]
    fn certificates_revalidate(
        a in interval(),
        b in interval(),
        times in prop::collection::btree_set(0usize..7, 1..4),
        tent in any::<bool>(),
        g in pl_map(),
    ) {
        prop_assume!(!a.is_point() && !b.is_point());
        let f = if tent { ExactMap::tent() } else { g };
        let times: Vec<usize> = times.into_iter().collect();
        certificate_revalidates(&f, &a, &b, &times)?;
    }

    #[test]
    fn flags_are_monotone(f in pl_map(), x in rational01(101), horizon in 8usize..200, radius in 0.001f64..0.3) {
        flags_monotone(&f, &x, horizon, radius)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codes_are_congruent(a in 0usize..2000) {
        code_congruence(a)?;
    }
}

#[test]
fn unit_interval_strategy_sanity() {
    let f = ExactMap::tent();
    image_preimage_sound(&f, &[Interval::unit()], &intdyn::r(1, 3)).unwrap();
}
