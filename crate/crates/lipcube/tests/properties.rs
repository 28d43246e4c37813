//! Property-based invariants across modules.

use proptest::prelude::*;

use lipcube::analysis::{
    avg_stretch_exhaustive, lipschitz_constant, max_displacement, stretch_report_exhaustive,
    AvgStretch, Rational,
};
use lipcube::cube::Point;
use lipcube::mappings::Mapping;
use lipcube::scd::chain_partner;

/// A random permutation table of `{0,1}^n` for small n.
fn permutation() -> impl Strategy<Value = (u32, Vec<u64>)> {
    (2u32..=6).prop_flat_map(|n| {
        (
            Just(n),
            Just((0..1u64 << n).collect::<Vec<u64>>()).prop_shuffle(),
        )
    })
}

fn point() -> impl Strategy<Value = Point> {
    (1u32..=40).prop_flat_map(|n| (0..1u64 << n).prop_map(move |bits| Point::new(bits, n)))
}

proptest! {
    #[test]
    fn stretch_report_is_internally_consistent((n, table) in permutation()) {
        let phi = Mapping::from_table("perm".into(), n, table).unwrap();
        let report = stretch_report_exhaustive(&phi).unwrap();
        let c = report.lipschitz_constant;
        prop_assert!(c >= 1 && c <= n);
        match report.avg_stretch {
            AvgStretch::Exact(avg) => {
                prop_assert!(avg >= Rational::new(1, 1));
                prop_assert!(avg <= Rational::from(c as u128));
                // raw denominator is n * 2^n
                prop_assert_eq!(*avg.denom(), (n as u128) << n);
            }
            AvgStretch::Sampled { .. } => prop_assert!(false, "exhaustive mode expected"),
        }
        prop_assert!(report.max_displacement <= n);
    }

    #[test]
    fn lipschitz_products_with_inverse_are_at_least_one((n, table) in permutation()) {
        let phi = Mapping::from_table("perm".into(), n, table).unwrap();
        let c = lipschitz_constant(&phi).unwrap();
        let c_inv = lipschitz_constant(&phi.invert().unwrap()).unwrap();
        prop_assert!(c >= 1);
        prop_assert!(c_inv >= 1);
        prop_assert!(c * c_inv >= 1);
    }

    #[test]
    fn inverting_twice_is_identity((n, table) in permutation()) {
        let phi = Mapping::from_table("perm".into(), n, table.clone()).unwrap();
        let back = phi.invert().unwrap().invert().unwrap();
        prop_assert_eq!(back.require_table().unwrap(), &table[..]);
    }

    #[test]
    fn composition_displacement_obeys_triangle_bound(
        (n, outer) in permutation(),
        inner_seed in any::<u64>(),
    ) {
        let outer = Mapping::from_table("outer".into(), n, outer).unwrap();
        let mut inner_table: Vec<u64> = (0..1u64 << n).collect();
        let mut rng = lipcube::cube::RngStream::new(inner_seed);
        rng.shuffle(&mut inner_table);
        let inner = Mapping::from_table("inner".into(), n, inner_table).unwrap();

        let composed = outer.compose(&inner).unwrap();
        let bound = max_displacement(&outer).unwrap() + max_displacement(&inner).unwrap();
        prop_assert!(max_displacement(&composed).unwrap() <= bound);
    }

    #[test]
    fn composition_average_stretch_is_defined_and_bounded((n, table) in permutation()) {
        let phi = Mapping::from_table("perm".into(), n, table).unwrap();
        let avg = avg_stretch_exhaustive(&phi).unwrap();
        let c = lipschitz_constant(&phi).unwrap();
        prop_assert!(avg <= Rational::from(c as u128));
    }

    #[test]
    fn chain_partner_is_a_weight_mirroring_involution(x in point()) {
        let y = chain_partner(x);
        prop_assert_eq!(x.weight() + y.weight(), x.dim());
        prop_assert_eq!(chain_partner(y), x);
    }

    #[test]
    fn flips_move_distance_by_exactly_one(x in point(), i in 1u32..=40) {
        prop_assume!(i <= x.dim());
        let y = x.flip(i);
        prop_assert_eq!(x.dist(y), 1);
        prop_assert_eq!(y.flip(i), x);
    }
}
