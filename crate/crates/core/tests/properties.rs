//! Cross-module properties on small random instances.

use mmslab::averaging::{
    build_operator, conjugate_function, l1_norm_bruteforce_oracle, l1_operator_norm,
    maximal_function, radii_grid,
};
use mmslab::experiments::{random_instance, spread_radii, verify_suite, Check, SuiteConfig};
use mmslab::measure::{lp_norm, FunctionOnSpace};
use mmslab::metric::BallKind;
use mmslab::nets::{doubling_upper_bound_with_net, net_constant_m, DEFAULT_EXHAUSTIVE_CAP};
use proptest::prelude::*;

#[test]
fn quick_suite_passes() {
    let report = verify_suite(&Check::ALL, &SuiteConfig::quick()).unwrap();
    for c in &report.checks {
        assert!(c.passed, "{}: {:?}", c.check.name(), c.witness);
    }
}

#[test]
fn empty_selection_is_an_error() {
    assert!(verify_suite(&[], &SuiteConfig::quick()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_matches_oracle_and_stays_below_m(seed in any::<u64>()) {
        let (space, measure) = random_instance(seed, 14, 3);
        for kind in BallKind::BOTH {
            let net = net_constant_m(&space, kind, None, DEFAULT_EXHAUSTIVE_CAP);
            prop_assert!(net.exact);
            let doubling = doubling_upper_bound_with_net(&space, kind, &net);
            prop_assert!(net.cardinality <= doubling.upper_bound);
            for s in spread_radii(&space, 4) {
                let op = build_operator(&space, &measure, s, kind).unwrap();
                let norm = l1_operator_norm(&op);
                let oracle = l1_norm_bruteforce_oracle(&op).unwrap();
                prop_assert!((norm - oracle).abs() <= 1e-12 * norm);
                prop_assert!(norm >= 1.0 - 1e-12);
                prop_assert!(norm <= net.cardinality as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn averaging_preserves_total_mass_of_the_conjugate_weighting(seed in any::<u64>()) {
        // sum_x (A f)(x) mu(x) = sum_y f(y) a(y) mu(y) with f = 1 gives sum a mu = mu(X)
        let (space, measure) = random_instance(seed, 20, 3);
        let s = spread_radii(&space, 3)[0];
        let a = conjugate_function(&space, &measure, s, BallKind::Closed).unwrap();
        let lhs: f64 = measure.support().iter().map(|&y| a.values[y] * measure.weight(y)).sum();
        prop_assert!((lhs - measure.total()).abs() <= 1e-12 * measure.total());
    }

    #[test]
    fn maximal_function_dominates_every_average(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let (space, measure) = random_instance(seed, 20, 3);
        let n = space.len();
        let f = FunctionOnSpace::new((0..n).map(|i| scale * ((i as f64).sin())).collect()).unwrap();
        let radii = radii_grid(&space, &measure);
        let mf = maximal_function(&space, &measure, &f, &radii, BallKind::Open).unwrap();
        for &r in &radii {
            let avg = build_operator(&space, &measure, r, BallKind::Open).unwrap().apply(&f.abs()).unwrap();
            for x in measure.support() {
                prop_assert!(mf.values()[x] >= avg.values()[x]);
            }
        }
        prop_assert!(lp_norm(&measure, &mf, 1.0).unwrap() >= lp_norm(&measure, &f, 1.0).unwrap() * (1.0 - 1e-12));
    }
}
