use approx::assert_relative_eq;
use gsteer::random::rng_for;
use gsteer::twomode::{asymmetry_ceiling, asymmetry_floor};
use gsteer::verify::{run_all, SuiteConfig};
use gsteer::{
    extremal_state, io, random_cm, random_cm_with, steering_measure, steering_report,
    tmsv_state, to_standard_form, CovarianceMatrix, Direction, RandomCmConfig,
};
use proptest::prelude::*;

#[test]
fn suites_pass_with_a_foreign_seed() {
    let config = SuiteConfig {
        cases: 300,
        mc_states: 4,
        mc_samples: 100_000,
        seed: 7,
        ..SuiteConfig::default()
    };
    let summary = run_all(&config);
    assert!(summary.passed, "{:?}", summary.failing());
}

#[test]
fn measures_are_unchanged_by_a_file_round_trip() {
    let sigma = random_cm(2, 1, 4.0, 11);
    let back = io::parse_cm(&io::cm_to_json(&sigma)).unwrap();
    let (r0, r1) = (steering_report(&sigma).unwrap(), steering_report(&back).unwrap());
    assert_eq!(r0, r1);
    let csv = io::parse_cm(&io::cm_to_csv(&sigma)).unwrap();
    assert_eq!(steering_report(&csv).unwrap(), r0);
}

#[test]
fn extremal_family_converges_to_its_limits() {
    for s in [1.5, 3.0, 7.0] {
        for a in [1e3, 1e6, 1e8] {
            let sigma = extremal_state(s, a).unwrap();
            assert_relative_eq!(
                steering_measure(&sigma, Direction::AToB).unwrap(),
                f64::ln(s),
                epsilon = 1e-12 + 1e-15 * a
            );
            // Entries of order a cost about a·ε of precision.
            let slack = 1e-12 + 1e-15 * a;
            let ba = steering_measure(&sigma, Direction::BToA).unwrap();
            assert!(ba <= f64::ln(s + 1.0) + slack);
            assert!(ba >= f64::ln(s + 1.0) - 10.0 / a - slack);
        }
    }
}

#[test]
fn swapping_parties_swaps_directions() {
    for seed in 0..50 {
        let sigma = random_cm(1, 2, 3.0, seed);
        let r = steering_report(&sigma).unwrap();
        let s = steering_report(&sigma.swap_parties()).unwrap();
        assert_relative_eq!(r.g_a_to_b, s.g_b_to_a, epsilon = 1e-12);
        assert_relative_eq!(r.g_b_to_a, s.g_a_to_b, epsilon = 1e-12);
    }
}

#[test]
fn tmsv_measures_equal_entanglement() {
    for a in [1.0001, 1.5, 3.0, 100.0] {
        let sigma = tmsv_state(a).unwrap();
        for d in [Direction::AToB, Direction::BToA] {
            assert_relative_eq!(steering_measure(&sigma, d).unwrap(), a.ln(), epsilon = 1e-10);
        }
    }
}

fn two_mode_strategy() -> impl Strategy<Value = CovarianceMatrix> {
    (any::<u64>(), 1.0f64..20.0, 0.0f64..2.0).prop_map(|(seed, t, r)| {
        let cfg = RandomCmConfig {
            temperature_scale: t,
            max_squeezing: r,
        };
        random_cm_with(1, 1, &cfg, &mut rng_for(seed, 0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn two_mode_sandwich(sigma in two_mode_strategy()) {
        let ab = steering_measure(&sigma, Direction::AToB).unwrap();
        let ba = steering_measure(&sigma, Direction::BToA).unwrap();
        prop_assert!(asymmetry_floor(ab) <= ba + 1e-9);
        prop_assert!(ba <= asymmetry_ceiling(ab) + 1e-9);
    }

    #[test]
    fn standard_form_preserves_measures(sigma in two_mode_strategy()) {
        let reduced = to_standard_form(&sigma).unwrap().to_cm().unwrap();
        for d in [Direction::AToB, Direction::BToA] {
            let g0 = steering_measure(&sigma, d).unwrap();
            let g1 = steering_measure(&reduced, d).unwrap();
            prop_assert!((g0 - g1).abs() <= 1e-8 * g0.max(1.0), "{g0} vs {g1}");
        }
    }
}
