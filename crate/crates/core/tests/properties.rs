mod common;

use common::run_property;

const CASES: u32 = 256;

macro_rules! properties {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = run_property(stringify!($name), CASES) {
                    panic!("{e}");
                }
            }
        )*

        #[test]
        fn every_shared_property_is_wired() {
            let wired = [$(stringify!($name)),*];
            for p in common::PROPERTIES {
                assert!(wired.contains(p), "{p} has no test");
            }
        }
    };
}

properties!(
    distance_scaling,
    hausdorff_metric,
    small_spaces_have_weightings,
    complexes_are_valid,
    degenerate_complexes_are_valid,
    cech_equals_alpha,
    alpha_1d_edges_are_half_gaps,
    h0_counts,
    euler_characteristic,
    euler_characteristic_alpha,
    betti_matches_brute_force,
    tie_order_invariance,
    tie_order_invariance_alpha,
    effective_points,
    scaling_consistency,
    monotone_1d,
    interval_bound_1d,
    rips_alpha_1d,
    sampler_determinism,
    regression_exact,
);
