//! Statistical contracts shared by every stimulus generator: translation
//! invariance, sign symmetry, covariance decay, and deterministic
//! substreams.

use rf_lab::rng::substream;
use rf_lab::stimulus::{sqexp_covariance, RadialLaw, StimulusModel};

fn generators(n: usize) -> Vec<(&'static str, StimulusModel)> {
    vec![
        ("ising", StimulusModel::ising(n, &[0.3, 0.7]).unwrap()),
        ("nlgp", StimulusModel::nlgp(n, 3.0, &[1.0, 2.0]).unwrap()),
        ("kur", StimulusModel::kur(n, 8.0, &[1.0, 2.0]).unwrap()),
        (
            "elliptical",
            StimulusModel::elliptical(
                vec![RadialLaw::StudentT { nu: 8.0 }, RadialLaw::StudentT { nu: 8.0 }],
                vec![
                    sqexp_covariance(n, 1.0, true).unwrap(),
                    sqexp_covariance(n, 2.0, true).unwrap(),
                ],
            )
            .unwrap(),
        ),
    ]
}

/// Covariance at one circular lag is constant across positions (4 MC
/// standard errors, batch 1e5).
#[test]
fn translation_invariance_across_positions() {
    let n = 16;
    let batch = 100_000;
    for (name, model) in generators(n) {
        let mut rng = substream(11, 1);
        let x = model.sample_class(1, batch, &mut rng).unwrap();
        for lag in [1usize, 2] {
            // per-position estimates with their own standard errors
            let mut estimates = Vec::with_capacity(n);
            let mut ses = Vec::with_capacity(n);
            for i in 0..n {
                let products: Vec<f64> =
                    x.rows().into_iter().map(|r| r[i] * r[(i + lag) % n]).collect();
                let mean = products.iter().sum::<f64>() / batch as f64;
                let var = products.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>()
                    / batch as f64;
                estimates.push(mean);
                ses.push((var / batch as f64).sqrt());
            }
            let pooled = estimates.iter().sum::<f64>() / n as f64;
            for i in 0..n {
                let dev = (estimates[i] - pooled).abs();
                assert!(
                    dev <= 4.0 * ses[i].max(1e-12),
                    "{name}: lag-{lag} covariance at position {i} deviates: {dev:.4e} vs 4 x {:.4e}",
                    ses[i]
                );
            }
        }
    }
}

/// First and third per-coordinate moments vanish (4 MC standard errors).
#[test]
fn sign_symmetry_of_odd_moments() {
    let n = 16;
    let batch = 100_000;
    for (name, model) in generators(n) {
        let mut rng = substream(13, 2);
        let x = model.sample_class(0, batch, &mut rng).unwrap();
        for power in [1u32, 3] {
            for i in 0..n {
                let values: Vec<f64> = x.column(i).iter().map(|v| v.powi(power as i32)).collect();
                let mean = values.iter().sum::<f64>() / batch as f64;
                let var =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / batch as f64;
                let se = (var / batch as f64).sqrt().max(1e-12);
                assert!(
                    mean.abs() <= 4.0 * se,
                    "{name}: odd moment {power} at coordinate {i} is {mean:.4e} (se {se:.4e})"
                );
            }
        }
    }
}

/// At the default lengthscales, correlations at lag n/2 have decayed away.
#[test]
fn covariance_decays_by_half_period() {
    let n = 40;
    let far = n / 2;
    let cases = vec![
        ("ising", StimulusModel::ising(n, &[0.3, 0.7]).unwrap()),
        ("nlgp", StimulusModel::nlgp(n, 100.0, &[0.3, 0.7]).unwrap()),
        ("kur", StimulusModel::kur(n, 10.0, &[1.0, 3.0]).unwrap()),
    ];
    for (name, model) in cases {
        for class in 0..2 {
            let cov = model.class_covariance(class).unwrap();
            let c = cov.correlation(far) / cov.variance();
            assert!(c.abs() < 0.05, "{name} class {class}: correlation at lag {far} is {c}");
        }
    }
}

/// Batches drawn from explicitly derived substreams do not depend on the
/// order in which the substreams are consumed.
#[test]
fn substreams_commute() {
    let model = StimulusModel::nlgp(12, 2.0, &[1.0, 2.0]).unwrap();
    let draw = |stream: u64| {
        let mut rng = substream(99, stream);
        rf_lab::stimulus::task_sample(&model, 64, &mut rng).unwrap()
    };
    let forward: Vec<_> = (0..4).map(draw).collect();
    let backward: Vec<_> = (0..4).rev().map(draw).collect();
    for (a, b) in forward.iter().zip(backward.iter().rev()) {
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.labels, b.labels);
    }
}

/// The normalized Kur marginal keeps the exact alg_k law at scale: KS test
/// at the 1% level with 1e5 pooled coordinates.
#[test]
fn kur_marginal_ks_at_default_scale() {
    let cov = sqexp_covariance(10, 2.0, true).unwrap();
    let k = 10.0;
    let mut rng = substream(17, 3);
    let out = rf_lab::stimulus::kur_sample(k, &cov, 10_000, &mut rng).unwrap();
    let mut raw: Vec<f64> = out.data.iter().map(|&x| x * out.normalization).collect();
    raw.sort_by(f64::total_cmp);
    let m = raw.len() as f64;
    let stat = raw
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = rf_lab::stimulus::alg_k_cdf(x, k);
            (f - i as f64 / m).abs().max((f - (i + 1) as f64 / m).abs())
        })
        .fold(0.0, f64::max);
    assert!(stat < 1.63 / m.sqrt(), "KS statistic {stat} at m = {m}");
}
