use approx::assert_relative_eq;
use gsteer::oracle::{empirical_reid, sample_gaussian_with_workers};
use gsteer::{reid_variances, sample_gaussian, tmsv_state, to_standard_form, random_cm, Party};

#[test]
fn samples_do_not_depend_on_worker_count() {
    let sigma = random_cm(1, 2, 3.0, 5);
    let one = sample_gaussian_with_workers(&sigma, 20_000, 9, 1).unwrap();
    let four = sample_gaussian_with_workers(&sigma, 20_000, 9, 4).unwrap();
    assert_eq!(one, four);
}

#[test]
fn empirical_covariance_tracks_the_state() {
    let sigma = random_cm(1, 1, 2.0, 3);
    let batch = sample_gaussian(&sigma, 400_000, 1).unwrap();
    let diff = (batch.covariance() - sigma.matrix()).abs().max();
    assert!(diff < 0.05 * sigma.matrix().abs().max(), "{diff}");
}

#[test]
fn reid_estimates_on_tmsv() {
    let sigma = tmsv_state(2.0).unwrap();
    let (exact_a, exact_b) = reid_variances(&sigma).unwrap();
    assert_relative_eq!(exact_a, 0.25, epsilon = 1e-12);
    let batch = sample_gaussian(&sigma, 500_000, 4).unwrap();
    for (party, exact) in [(Party::A, exact_a), (Party::B, exact_b)] {
        let est = empirical_reid(&batch, party).unwrap();
        assert!((est.product - exact).abs() <= 4.0 * est.std_error, "{est:?}");
    }
}

#[test]
fn reid_needs_standard_form() {
    let sigma = random_cm(1, 1, 2.0, 8);
    assert!(reid_variances(&sigma).is_err());
    let reduced = to_standard_form(&sigma).unwrap().to_cm().unwrap();
    assert!(reid_variances(&reduced).is_ok());
}
