//! Invariants over generated presheaves.

use geodecomp::decomp::{
    daggers, dual_decomposition, dual_decomposition_with_peel, geometric_decomposition,
    geometric_decomposition_with_peel, unisolvence_check, DaggerKind,
};
use geodecomp::extension::{
    consistent_from_local, extend_family_to_hat, full_extension, local_from_consistent,
    ExtensionFamily,
};
use geodecomp::funcspace::{synthesize_presheaf, synthesize_presheaf_with, Carrier};
use geodecomp::linalg::RatMatrix;
use geodecomp::poset::PeelDirection;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lifted(seed: u64, carrier: Carrier) -> ExtensionFamily {
    let (space, family) = synthesize_presheaf_with(seed, 14, 5, carrier);
    extend_family_to_hat(&family, &space.with_global_top()).unwrap()
}

fn same_span(a: &RatMatrix, b: &RatMatrix) -> bool {
    a.cols() == b.cols() && RatMatrix::hstack(a.rows(), &[a, b]).unwrap().rank() == a.cols()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_and_consistent_forms_round_trip(seed in 0u64..10_000) {
        let (space, family) = synthesize_presheaf(seed, 14, 5);
        let hat = space.with_global_top();
        let locals = local_from_consistent(&family, &hat.global).unwrap();
        let back = consistent_from_local(&hat, &locals).unwrap();
        for k in space.poset().elements() {
            for f in space.poset().elements() {
                prop_assert_eq!(back.op(k, f), family.op(k, f));
            }
        }
    }

    #[test]
    fn blocks_do_not_depend_on_the_peel(seed in 0u64..10_000, peel_seed in any::<u64>()) {
        let family = lifted(seed, Carrier::Vertices);
        let p = family.space().poset();
        let reference = geometric_decomposition(&family).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(peel_seed);
        let order = p.random_peel(PeelDirection::Down, &mut rng);
        prop_assert!(p.is_valid_peel(&order, PeelDirection::Down));
        let other = geometric_decomposition_with_peel(&family, &order).unwrap();
        prop_assert!(other.is_certified());
        for e in p.elements() {
            prop_assert!(same_span(reference.block(e), other.block(e)));
        }
    }

    #[test]
    fn block_dims_are_vanishing_dims(seed in 0u64..10_000) {
        let family = lifted(seed, Carrier::Faces);
        let d = geometric_decomposition(&family).unwrap();
        prop_assert!(d.is_certified());
        for e in family.space().poset().elements() {
            prop_assert_eq!(d.block(e).cols(), family.vanishing_dim(e));
        }
    }

    #[test]
    fn dual_blocks_annihilate_other_primal_blocks(seed in 0u64..10_000, projection in any::<bool>()) {
        let family = lifted(seed, Carrier::Vertices);
        let kind = if projection { DaggerKind::Projection } else { DaggerKind::Euclidean };
        let primal = geometric_decomposition(&family).unwrap();
        let ds = daggers(&family, kind).unwrap();
        let dual = dual_decomposition(&family, &ds).unwrap();
        prop_assert!(dual.is_certified());
        prop_assert!(unisolvence_check(&primal, &dual).unwrap().is_certified());
        let p = family.space().poset();
        // A functional of F pairs to zero with blocks of elements not below F.
        for f in p.elements() {
            for g in p.elements().filter(|&g| !p.leq(g, f)) {
                prop_assert!((&dual.block(f).transpose() * primal.block(g)).is_zero());
            }
        }
    }

    #[test]
    fn dual_peels_agree(seed in 0u64..10_000, peel_seed in any::<u64>()) {
        let family = lifted(seed, Carrier::Faces);
        let p = family.space().poset();
        let ds = daggers(&family, DaggerKind::Euclidean).unwrap();
        let reference = dual_decomposition(&family, &ds).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(peel_seed);
        let order = p.random_peel(PeelDirection::Up, &mut rng);
        prop_assert!(p.is_valid_peel(&order, PeelDirection::Up));
        let other = dual_decomposition_with_peel(&family, &ds, &order).unwrap();
        for e in p.elements() {
            prop_assert!(same_span(reference.block(e), other.block(e)));
        }
    }

    #[test]
    fn full_extensions_certify(seed in 0u64..10_000) {
        let (_, family) = synthesize_presheaf(seed, 10, 4);
        let full = full_extension(&family).unwrap();
        prop_assert!(full.certify(family.space()).is_valid());
    }
}
