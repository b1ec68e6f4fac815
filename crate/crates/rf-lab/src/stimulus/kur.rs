//! Controllable-kurtosis stimuli via Gaussian copulas.
//!
//! Coordinates are `f^{-1}(Phi(Z_i / sigma)) / Z` where `f` is the
//! generalized algebraic sigmoid CDF
//! `alg_k(x) = (1 + x / (1 + |x|^k)^{1/k}) / 2`
//! and `Z` a correlated Gaussian field, so the marginal law is exactly the
//! `alg_k` law while the dependence comes from the Gaussian copula. The tail
//! of the `alg_k` density decays like `|x|^{-(k+1)}`: the variance diverges
//! for `k <= 2` and the fourth moment for `k <= 4`. Normalization uses the
//! quadrature variance for `k > 4`; in the heavy-tailed regime `k <= 4` each
//! batch is standardized empirically instead and flagged as such.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::quad::{gauss_hermite_128, integrate_unit_refined};
use crate::stimulus::covariance::CirculantCovariance;
use crate::stimulus::nlgp::gaussian_batch;

/// Tail index above which the quadrature normalization is used; at or below
/// it the fourth moment diverges and batches are standardized empirically.
pub const HEAVY_TAIL_K: f64 = 4.0;

/// Truncation for the quantile-moment quadrature, `u in (eps, 1 - eps)`.
const QUANTILE_EPS: f64 = 1e-8;

/// Generalized algebraic sigmoid CDF.
pub fn alg_k_cdf(x: f64, k: f64) -> f64 {
    0.5 * (1.0 + x / (1.0 + x.abs().powf(k)).powf(1.0 / k))
}

/// Nonnegative quantile at upper-tail probability `p in (0, 1/2]`,
/// i.e. `f^{-1}(1 - p)`. With `v = 1 - 2p` this is
/// `v / (1 - v^k)^{1/k}`; `1 - v^k` is evaluated as
/// `-expm1(k log1p(-2p))` so tiny tail probabilities keep full precision.
fn alg_k_upper_quantile(p: f64, k: f64) -> f64 {
    let v = 1.0 - 2.0 * p;
    let one_minus_vk = -libm::expm1(k * libm::log1p(-2.0 * p));
    v / one_minus_vk.powf(1.0 / k)
}

/// Exact inverse of [`alg_k_cdf`]: with `v = 2u - 1`,
/// `sign(v) |v| / (1 - |v|^k)^{1/k}`.
pub fn alg_k_cdf_inverse(u: f64, k: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::UnboundedSupport { u });
    }
    if u >= 0.5 {
        Ok(alg_k_upper_quantile(1.0 - u, k))
    } else {
        Ok(-alg_k_upper_quantile(u, k))
    }
}

/// Copula transform `f^{-1}(Phi(z / sigma))`, evaluated through the
/// complementary normal tail so extreme arguments never round the quantile
/// onto the endpoints.
pub fn copula_transform(z: f64, sigma: f64, k: f64) -> f64 {
    let t = z / sigma;
    let p = (0.5 * libm::erfc(t.abs() / std::f64::consts::SQRT_2)).max(f64::MIN_POSITIVE);
    let x = alg_k_upper_quantile(p, k);
    if t < 0.0 {
        -x
    } else {
        x
    }
}

fn quantile_moment(k: f64, power: i32) -> f64 {
    integrate_unit_refined(
        |u| alg_k_cdf_inverse(u, k).expect("u in (0,1)").powi(power),
        1e-14,
        QUANTILE_EPS,
    )
}

fn moment_cache(power: i32) -> &'static Mutex<HashMap<u64, f64>> {
    static M2: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    static M4: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cell = if power == 2 { &M2 } else { &M4 };
    cell.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_moment(k: f64, power: i32) -> f64 {
    let cache = moment_cache(power);
    let mut map = cache.lock().expect("moment cache poisoned");
    *map.entry(k.to_bits()).or_insert_with(|| quantile_moment(k, power))
}

/// Variance of the raw `alg_k` law (diverges for `k <= 2`).
pub fn kur_marginal_variance(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("tail index must be positive, got {k}")));
    }
    if k <= 2.0 {
        return Err(Error::DivergentMoment { what: "variance", k });
    }
    Ok(cached_moment(k, 2))
}

/// Fourth moment of the raw `alg_k` law (diverges for `k <= 4`).
pub fn kur_marginal_fourth_moment(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("tail index must be positive, got {k}")));
    }
    if k <= HEAVY_TAIL_K {
        return Err(Error::DivergentMoment { what: "fourth moment", k });
    }
    Ok(cached_moment(k, 4))
}

/// Excess kurtosis of the `alg_k` law by quadrature (`k > 4`).
pub fn kur_excess_kurtosis_quadrature(k: f64) -> Result<f64> {
    let m2 = kur_marginal_variance(k)?;
    let m4 = kur_marginal_fourth_moment(k)?;
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Normalization constant dividing the raw coordinates: the quadrature
/// standard deviation for `k > 4`, `None` in the heavy-tailed regime where
/// batches are standardized empirically.
pub fn kur_norm_constant(k: f64) -> Option<f64> {
    if k > HEAVY_TAIL_K {
        Some(cached_moment(k, 2).sqrt())
    } else {
        None
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// A sampled batch together with the normalization that produced it.
#[derive(Debug, Clone)]
pub struct KurBatch {
    /// batch x n matrix of normalized coordinates.
    pub data: Array2<f64>,
    /// The constant the raw quantile values were divided by.
    pub normalization: f64,
    /// True when the normalization was the batch's own standard deviation
    /// (heavy-tailed regime `k <= 4`).
    pub empirical_norm: bool,
}

/// Raw copula transform without normalization: `f^{-1}(Phi(Z_i / sigma))`.
pub fn kur_sample_raw<R: Rng + ?Sized>(
    k: f64,
    cov: &CirculantCovariance,
    batch: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("tail index must be positive, got {k}")));
    }
    let sigma = cov.variance().sqrt();
    let mut z = gaussian_batch(cov, batch, rng);
    z.mapv_inplace(|v| copula_transform(v, sigma, k));
    Ok(z)
}

/// Sample a normalized batch; see [`KurBatch`] for the normalization rule.
pub fn kur_sample<R: Rng + ?Sized>(
    k: f64,
    cov: &CirculantCovariance,
    batch: usize,
    rng: &mut R,
) -> Result<KurBatch> {
    let mut data = kur_sample_raw(k, cov, batch, rng)?;
    let (normalization, empirical_norm) = match kur_norm_constant(k) {
        Some(z) => (z, false),
        None => {
            let m2 = data.iter().map(|v| v * v).sum::<f64>() / data.len() as f64;
            (m2.sqrt(), true)
        }
    };
    data.mapv_inplace(|v| v / normalization);
    Ok(KurBatch { data, normalization, empirical_norm })
}

/// Analytic covariance of the normalized coordinates (`k > 2`): bivariate
/// Gauss-Hermite expectations of the copula transform at each latent lag,
/// divided by the quadrature variance. Unit diagonal by construction.
pub fn kur_covariance(k: f64, latent: &CirculantCovariance) -> Result<CirculantCovariance> {
    let m2 = kur_marginal_variance(k)?;
    let gh = gauss_hermite_128();
    let h = |z: f64| copula_transform(z, 1.0, k);
    let row: Vec<f64> = latent
        .first_row()
        .iter()
        .enumerate()
        .map(|(d, &c)| {
            if d == 0 {
                1.0
            } else {
                let rho = c / latent.variance();
                gh.expect_bivariate(rho, |u, v| h(u) * h(v)) / m2
            }
        })
        .collect();
    CirculantCovariance::circulant(row)
}
