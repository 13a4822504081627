use proptest::prelude::*;
use stabreg_core::definability::{define_subgroup, evaluate_dnf};
use stabreg_core::rational::{int, ratio};
use stabreg_core::regularity::{decompose, decompose_normal, DecomposeOptions};
use stabreg_core::repgroup::{ElementSet, IntegerLattice};
use stabreg_core::setsys::{epsilon_net, translates_system, vc_dimension, verify_epsilon_net, Side};
use stabreg_core::stability::stability_index;
use stabreg_core::stabilizer::stab_set;
use stabreg_core::tripling::{decompose_tripling, ruzsa_check, verify_tripling, TriplingOptions};
use stabreg_core::verify::verify_report;
use stabreg_core::{build_group, Caps, FiniteGroup, GroupSubset, Rational};

const GROUPS: &[&str] = &["Z/6", "S/3", "Z/8", "D/4", "Q/8", "Z/2xZ/4", "Z/9", "D/5", "Z/12", "Z/2xZ/6"];

fn group(i: usize) -> FiniteGroup {
    build_group(GROUPS[i], &Caps::default()).unwrap()
}

fn eps(i: usize) -> Rational {
    [(1, 2), (1, 4), (1, 8), (1, 3)].map(|(p, q)| ratio(p, q))[i].clone()
}

fn subset(g: &FiniteGroup, mask: u64) -> GroupSubset {
    let n = g.order();
    GroupSubset::from_mask(n, mask & ((1u64 << n) - 1))
}

fn exact_caps(g: &FiniteGroup) -> Caps {
    Caps { half_graph_k: g.order() + 1, ..Caps::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stability_is_translation_invariant(gi in 0..GROUPS.len(), mask in any::<u64>(), t in 0usize..16) {
        let g = group(gi);
        let caps = exact_caps(&g);
        let a = subset(&g, mask);
        let t = t % g.order();
        let k = stability_index(&g, &a, &caps).unwrap();
        prop_assert_eq!(stability_index(&g, &a.translate_left(&g, t).unwrap(), &caps).unwrap(), k);
        prop_assert_eq!(stability_index(&g, &a.translate_right(&g, t).unwrap(), &caps).unwrap(), k);
    }

    #[test]
    fn vc_dimension_is_below_index_and_log(gi in 0..GROUPS.len(), mask in any::<u64>()) {
        let g = group(gi);
        let caps = exact_caps(&g);
        let a = subset(&g, mask);
        let k = stability_index(&g, &a, &caps).unwrap();
        for side in [Side::Left, Side::Right] {
            let vc = vc_dimension(&translates_system(&g, &a, side), None, &caps).unwrap();
            prop_assert!(vc.exhaustive);
            prop_assert!(vc.dimension < k.max(1));
            prop_assert!(1usize << vc.dimension <= g.order());
        }
    }

    #[test]
    fn decompositions_verify(gi in 0..GROUPS.len(), mask in any::<u64>(), ei in 0usize..4) {
        let g = group(gi);
        let a = subset(&g, mask);
        let e = eps(ei);
        let opts = DecomposeOptions { caps: exact_caps(&g), ..DecomposeOptions::default() };
        let r = decompose(&g, &a, &e, &opts).unwrap();
        let v = verify_report(&g, &a, &e, &r);
        prop_assert!(v.all_passed(), "{:?}", v.failures());
        prop_assert!(int(r.error_count as u64) < &e * int(r.h.len() as u64));
        let n = decompose_normal(&g, &a, &e, &opts).unwrap();
        prop_assert!(n.h.is_normal(&g));
        prop_assert!(verify_report(&g, &a, &e, &n).all_passed());
    }

    #[test]
    fn formula_defines_level_set(gi in 0..GROUPS.len(), mask in any::<u64>(), ei in 0usize..4, seed in any::<u64>()) {
        let g = group(gi);
        let a = subset(&g, mask);
        let opts = DecomposeOptions { caps: exact_caps(&g), ..DecomposeOptions::default() };
        let d = define_subgroup(&g, &a, &eps(ei), &opts, seed).unwrap();
        let defined = evaluate_dnf(&g, &d.formula).unwrap();
        prop_assert_eq!(&defined, &stab_set(&g, &a, &d.pair.kappa));
        prop_assert_eq!(&defined, d.report.h.carrier());
    }

    #[test]
    fn epsilon_nets_verify(gi in 0..GROUPS.len(), mask in any::<u64>(), ei in 0usize..4, seed in any::<u64>()) {
        let g = group(gi);
        let a = subset(&g, mask);
        let system = translates_system(&g, &a, Side::Left);
        let d = vc_dimension(&system, None, &Caps::default()).unwrap().dimension;
        let e = eps(ei);
        let net = epsilon_net(&system, &e, d, seed, &Caps::default()).unwrap();
        prop_assert!(verify_epsilon_net(&system, &e, &net));
    }

    #[test]
    fn short_intervals_decompose(lo in -20i64..20, len in 1i64..7, ei in 0usize..2) {
        let z = IntegerLattice { dim: 1 };
        let a: ElementSet<Vec<i64>> = (lo..lo + len).map(|x| vec![x]).collect();
        prop_assert!(ruzsa_check(&z, &a, &Caps::default()).unwrap().holds);
        let e = eps(ei);
        let r = decompose_tripling(&z, &a, &e, &TriplingOptions::default()).unwrap();
        prop_assert!(verify_tripling(&z, &a, &e, &r).all_passed());
    }
}

#[test]
fn subgroups_are_their_own_decomposition() {
    let g = build_group("Z/2xZ/6", &Caps::default()).unwrap();
    let h = GroupSubset::from_predicate(12, |x| g.mul(x, x) == 0);
    let r = decompose(&g, &h, &ratio(1, 8), &DecomposeOptions::default()).unwrap();
    assert_eq!(r.h.carrier(), &h);
    assert_eq!(r.error_count, 0);
    assert_eq!(r.k_used, 2);
}
