//! Property suites for the localization metrics and the small closed-form
//! maps they rely on.

use proptest::prelude::*;
use rf_lab::flow::{alg, alg_inv};
use rf_lab::metrics::{excess_kurtosis, ipr, peak_index, sinusoid_fit};

fn weight_vec() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, 4..64).prop_filter("nonzero", |w| {
        w.iter().map(|v| v * v).sum::<f64>() > 1e-6
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ipr_is_scale_invariant_and_bounded(w in weight_vec(), c in prop_oneof![-40.0f64..-0.01, 0.01f64..40.0]) {
        let base = ipr(&w).unwrap();
        let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
        prop_assert!((ipr(&scaled).unwrap() - base).abs() <= 1e-12);
        let n = w.len() as f64;
        prop_assert!(base >= 1.0 / n - 1e-12 && base <= 1.0 + 1e-12);
    }

    #[test]
    fn kurtosis_is_scale_invariant(samples in proptest::collection::vec(-3.0f64..3.0, 16..400), c in 0.01f64..25.0) {
        prop_assume!(samples.iter().any(|&v| (v - samples[0]).abs() > 1e-6));
        let base = excess_kurtosis(&samples).unwrap();
        let scaled: Vec<f64> = samples.iter().map(|v| c * v).collect();
        prop_assert!((excess_kurtosis(&scaled).unwrap() - base).abs() <= 1e-10 * base.abs().max(1.0));
    }

    #[test]
    fn sinusoid_residual_is_invariant_under_circular_shift(w in weight_vec(), shift in 0usize..64) {
        let fit = sinusoid_fit(&w).unwrap();
        let n = w.len();
        let shifted: Vec<f64> = (0..n).map(|i| w[(i + shift) % n]).collect();
        let fit2 = sinusoid_fit(&shifted).unwrap();
        prop_assert!(
            (fit.rel_residual - fit2.rel_residual).abs() <= 1e-10,
            "{} vs {}", fit.rel_residual, fit2.rel_residual
        );
    }

    #[test]
    fn peak_is_invariant_under_positive_scaling(w in weight_vec(), c in 0.01f64..50.0) {
        let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
        prop_assert_eq!(peak_index(&w).unwrap(), peak_index(&scaled).unwrap());
    }

    #[test]
    fn alg_round_trips(x in -40.0f64..40.0) {
        let a = alg(x);
        prop_assert!(a.abs() < 1.0);
        let back = alg_inv(a).unwrap();
        // conditioning costs eps * x^2 in relative terms
        let tol = 1e-11 * (1.0 + x * x) * x.abs().max(1.0);
        prop_assert!((back - x).abs() <= tol, "{} -> {} -> {}", x, a, back);
    }

    #[test]
    fn alg_k_quantile_round_trips(u in 0.002f64..0.998, k in 2.5f64..30.0) {
        let x = rf_lab::stimulus::alg_k_cdf_inverse(u, k).unwrap();
        let back = rf_lab::stimulus::alg_k_cdf(x, k);
        prop_assert!((back - u).abs() <= 1e-11, "u {} -> x {} -> {}", u, x, back);
    }
}

#[test]
fn ipr_bounds_are_attained() {
    let uniform = vec![0.25; 16];
    assert!((ipr(&uniform).unwrap() - 1.0 / 16.0).abs() < 1e-14);
    let mut one_hot = vec![0.0; 16];
    one_hot[3] = -4.0;
    assert!((ipr(&one_hot).unwrap() - 1.0).abs() < 1e-14);
}
