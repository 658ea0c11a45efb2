//! Randomized invariants of paths, counts and optimal matchings.

use std::collections::BTreeSet;

use dyck_entropy::matching::{
    cost, count_optimal, decode_mth, entropy, h_lb, is_optimal, k_lb_profile, k_pi_profile, Instance, Matching,
};
use dyck_entropy::oracle::exhaustive_optima;
use dyck_entropy::paths::{closing_steps, from_instance, heights};
use dyck_entropy::SignPath;
use num_bigint::BigUint;
use proptest::prelude::*;

fn balanced(n: usize) -> Vec<i8> {
    let mut v = vec![1i8; n];
    v.extend(std::iter::repeat_n(-1, n));
    v
}

fn bridge(max_n: usize) -> impl Strategy<Value = SignPath> {
    (0..=max_n).prop_flat_map(|n| Just(balanced(n)).prop_shuffle().prop_map(|s| SignPath::new(s).unwrap()))
}

fn instance(min_n: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (min_n..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(-10.0f64..10.0, 2 * n))
        .prop_filter_map("generic coordinates", |coords| {
            let n = coords.len() / 2;
            Instance::new(coords[..n].to_vec(), coords[n..].to_vec()).ok()
        })
}

fn permutation(n: usize) -> impl Strategy<Value = Matching> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|p| Matching::new(p).unwrap())
}

proptest! {
    #[test]
    fn reflection_preserves_the_count(path in bridge(12)) {
        let z = count_optimal(&path).unwrap().count;
        prop_assert_eq!(count_optimal(&path.reflected()).unwrap().count, z);
    }

    #[test]
    fn closing_product_equals_down_step_product(path in bridge(12)) {
        let profile = heights(&path);
        let down: BigUint = path
            .steps()
            .iter()
            .zip(&profile.hbar)
            .filter(|(&s, _)| s < 0)
            .map(|(_, &h)| BigUint::from(h))
            .product();
        let closing: BigUint = closing_steps(&path).iter().map(|c| BigUint::from(c.hbar)).product();
        prop_assert_eq!(&down, &closing);
        prop_assert_eq!(closing, count_optimal(&path).unwrap().count);
    }

    #[test]
    fn entropy_adds_over_concatenation(a in bridge(8), b in bridge(8)) {
        let joint = entropy(&a.concat(&b)).unwrap();
        prop_assert!((joint - entropy(&a).unwrap() - entropy(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decoded_matchings_attain_the_bound(inst in instance(1, 10), pick in any::<u64>()) {
        let path = from_instance(&inst);
        let z = count_optimal(&path).unwrap().count;
        let m = BigUint::from(pick) % &z + 1u32;
        let matching = decode_mth(&path, &m).unwrap();
        prop_assert!(is_optimal(&path, &matching).unwrap());
        prop_assert_eq!(k_pi_profile(&inst, &matching).unwrap(), k_lb_profile(&inst));
        let bound = h_lb(&inst);
        prop_assert!((cost(&inst, &matching).unwrap() - bound).abs() <= 1e-9 * bound.max(1.0));
    }

    #[test]
    fn every_matching_costs_at_least_the_bound(
        (inst, matching) in instance(1, 10).prop_flat_map(|i| {
            let n = i.size();
            (Just(i), permutation(n))
        })
    ) {
        let bound = h_lb(&inst);
        prop_assert!(cost(&inst, &matching).unwrap() >= bound - 1e-9 * bound.max(1.0));
        // optimality by cost and by the stack test agree
        let path = from_instance(&inst);
        let tight = (cost(&inst, &matching).unwrap() - bound).abs() <= 1e-9 * bound.max(1.0);
        prop_assert_eq!(tight, is_optimal(&path, &matching).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_equals_exhaustive_argmin(inst in instance(1, 6)) {
        let path = from_instance(&inst);
        let enumerated: BTreeSet<Matching> = count_optimal(&path).unwrap().iter().collect();
        let report = exhaustive_optima(&inst, 1e-9).unwrap();
        prop_assert_eq!(enumerated, report.argmin_set);
    }
}
