//! Nonlinear Gaussian process stimuli: coordinatewise `erf(g Z) / Z(g)` of a
//! correlated Gaussian field.
//!
//! The gain `g` interpolates the marginals from Gaussian (`g -> 0`) to binary
//! support on +-1 (`g -> infinity`) while the normalization `Z(g)` keeps the
//! variance of each coordinate equal to the latent variance.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::stimulus::covariance::CirculantCovariance;

/// Closed form for `E[erf(g Z)^2]`, `Z ~ N(0, var_z)`:
/// `(2/pi) arcsin(2 g^2 var_z / (1 + 2 g^2 var_z))`.
pub fn erf_sq_expectation(g: f64, var_z: f64) -> f64 {
    let s = 2.0 * g * g * var_z;
    std::f64::consts::FRAC_2_PI * (s / (1.0 + s)).asin()
}

/// Normalization `Z(g) = sqrt(E[erf(g Z)^2] / var_z)` making the transformed
/// coordinates match the latent variance.
pub fn nlgp_norm_constant(g: f64, var_z: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("gain must be positive, got {g}")));
    }
    if !(var_z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "latent variance must be positive, got {var_z}"
        )));
    }
    Ok((erf_sq_expectation(g, var_z) / var_z).sqrt())
}

/// Batch of correlated standard-normal rows `Z ~ N(0, cov)`, drawn through
/// the symmetric square root of the covariance.
pub fn gaussian_batch<R: Rng + ?Sized>(
    cov: &CirculantCovariance,
    batch: usize,
    rng: &mut R,
) -> Array2<f64> {
    let n = cov.n();
    let sqrt = cov.sqrt_factor();
    let mut g = Array2::zeros((batch, n));
    for v in g.iter_mut() {
        *v = rng.sample::<f64, _>(StandardNormal);
    }
    g.dot(&sqrt.t())
}

/// Sample a batch of `erf(g Z) / Z(g)` vectors with latent covariance `cov`.
pub fn nlgp_sample<R: Rng + ?Sized>(
    g: f64,
    cov: &CirculantCovariance,
    batch: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let z_norm = nlgp_norm_constant(g, cov.variance())?;
    let mut z = gaussian_batch(cov, batch, rng);
    z.mapv_inplace(|v| libm::erf(g * v) / z_norm);
    Ok(z)
}

/// Analytic covariance of the transformed field: for latent covariance
/// `c_d` at lag `d` and latent variance `s2`,
/// `Cov(X_i, X_j) = s2 * arcsin(2 g^2 c_d / (1 + 2 g^2 s2)) / arcsin(2 g^2 s2 / (1 + 2 g^2 s2))`.
pub fn nlgp_covariance(g: f64, latent: &CirculantCovariance) -> Result<CirculantCovariance> {
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("gain must be positive, got {g}")));
    }
    let s2 = latent.variance();
    let denom = 1.0 + 2.0 * g * g * s2;
    let scale = s2 / (2.0 * g * g * s2 / denom).asin();
    let row: Vec<f64> = latent
        .first_row()
        .iter()
        .map(|&c| scale * (2.0 * g * g * c / denom).asin())
        .collect();
    CirculantCovariance::circulant(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_hermite_128, GaussLegendre};
    use crate::rng::root;
    use crate::stimulus::covariance::sqexp_covariance;
    use approx::assert_abs_diff_eq;

    /// Adaptive oracle for E[f(Z)], Z ~ N(0,1): composite Gauss-Legendre with
    /// geometric panels toward zero, resolving any inner lengthscale of f.
    fn gaussian_expect_refined<F: Fn(f64) -> f64>(f: F) -> f64 {
        let gl = GaussLegendre::new(32);
        let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut total = 0.0;
        let mut hi = 10.0f64;
        while hi > 1e-14 {
            let lo = hi / 2.0;
            total += gl.integrate(lo, hi, |z| f(z) * density(z));
            total += gl.integrate(-hi, -lo, |z| f(z) * density(z));
            hi = lo;
        }
        total
    }

    #[test]
    fn closed_form_erf_square_matches_quadrature() {
        for g in [0.01, 1.0, 100.0] {
            let closed = erf_sq_expectation(g, 1.0);
            let quad = gaussian_expect_refined(|z| libm::erf(g * z).powi(2));
            assert_abs_diff_eq!(closed, quad, epsilon = 1e-10);
        }
    }

    #[test]
    fn norm_constant_limits() {
        // g -> 0: Z(g)/g -> 2/sqrt(pi)
        let g = 1e-6;
        let ratio = nlgp_norm_constant(g, 1.0).unwrap() / g;
        assert_abs_diff_eq!(ratio, 2.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-6);
        // g large: E[erf^2] -> 1, Z -> 1
        let z = nlgp_norm_constant(100.0, 1.0).unwrap();
        assert!((z - 1.0).abs() < 0.01, "Z(100) = {z}");
    }

    #[test]
    fn variance_matches_latent_variance() {
        // derived oracle: quadrature for E[erf(g Z)^2] fixes the target
        let cov = sqexp_covariance(16, 2.0, true).unwrap();
        for g in [0.5, 3.0] {
            let mut rng = root(9);
            let x = nlgp_sample(g, &cov, 40_000, &mut rng).unwrap();
            let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
            assert!((var - 1.0).abs() < 0.01, "g = {g}: variance {var}");
        }
    }

    #[test]
    fn small_gain_marginals_are_nearly_gaussian() {
        let cov = sqexp_covariance(16, 2.0, true).unwrap();
        let mut rng = root(17);
        let x = nlgp_sample(0.01, &cov, 62_500, &mut rng).unwrap();
        let m2 = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let m4 = x.iter().map(|v| v.powi(4)).sum::<f64>() / x.len() as f64;
        let excess = m4 / (m2 * m2) - 3.0;
        assert!(excess.abs() < 0.1, "excess kurtosis {excess} at g = 0.01");
    }

    #[test]
    fn large_gain_saturates_to_binary_support() {
        // P(|erf(g Z)| >= 0.99) = P(|Z| >= erfinv(0.99)/g) = 98.55% at
        // g = 100 and crosses 99% near g = 146
        let cov = sqexp_covariance(16, 2.0, true).unwrap();
        for (g, min_frac) in [(100.0, 0.98), (200.0, 0.99)] {
            let mut rng = root(23);
            let x = nlgp_sample(g, &cov, 10_000, &mut rng).unwrap();
            let z_norm = nlgp_norm_constant(g, 1.0).unwrap();
            let saturated = x
                .iter()
                .filter(|&&v| {
                    let raw = (v * z_norm).abs();
                    (0.99..=1.0).contains(&raw)
                })
                .count();
            let frac = saturated as f64 / x.len() as f64;
            assert!(frac >= min_frac, "only {frac} of coordinates saturated at g = {g}");
        }
    }

    #[test]
    fn analytic_covariance_matches_bivariate_quadrature() {
        let latent = sqexp_covariance(12, 2.0, true).unwrap();
        let g = 1.5;
        let cov = nlgp_covariance(g, &latent).unwrap();
        let z_norm = nlgp_norm_constant(g, 1.0).unwrap();
        let gh = gauss_hermite_128();
        for d in [1usize, 2, 3] {
            let rho = latent.first_row()[d];
            let direct = gh.expect_bivariate(rho, |u, v| {
                libm::erf(g * u) * libm::erf(g * v) / (z_norm * z_norm)
            });
            assert_abs_diff_eq!(cov.first_row()[d], direct, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(cov.variance(), 1.0, epsilon = 1e-12);
    }
}
