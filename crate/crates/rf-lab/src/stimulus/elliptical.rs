//! Elliptical stimulus ensembles `X = R * Lambda * U` with `U` uniform on
//! the sphere and a scalar radial law `R`.
//!
//! `Lambda` is the symmetric square root of the circulant class covariance,
//! so `Lambda Lambda^T = Sigma_y` with `D = N`. Three radial laws are
//! provided: the multivariate Student-t radius (`R^2 = N F_{N,nu}`), a fixed
//! shell (`R = 1`), and a custom law with density
//! `p_R(r) = 4 e^{2r+4} / (e^{2r} + e^4)^2` on `r >= 2`, which pushes mass
//! just outside an ellipsoidal shell.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, FisherF, StandardNormal};

use crate::error::{Error, Result};
use crate::stimulus::covariance::CirculantCovariance;

/// Law of the scalar radius in `X = R * Lambda * U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialLaw {
    /// Multivariate Student-t with `nu` degrees of freedom: `R^2 = N * F`
    /// with `F ~ Fisher(N, nu)`.
    StudentT { nu: f64 },
    /// Surface of the ellipsoid: `R = 1`.
    Shell,
    /// `R = 2 + ln((1 + u)/(1 - u)) / 2`, `u ~ U(0,1)`: the exact inverse
    /// CDF of the custom density above.
    CustomRadial,
}

impl RadialLaw {
    pub fn validate(&self) -> Result<()> {
        if let RadialLaw::StudentT { nu } = self {
            if !(*nu > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Student-t degrees of freedom must be positive, got {nu}"
                )));
            }
        }
        Ok(())
    }

    /// Mean squared radius (used for covariance bookkeeping); `None` when it
    /// diverges (Student-t with `nu <= 2`).
    pub fn mean_square_radius(&self, n: usize) -> Option<f64> {
        match self {
            RadialLaw::StudentT { nu } => {
                if *nu > 2.0 {
                    // E[F_{n,nu}] = nu / (nu - 2)
                    Some(n as f64 * nu / (nu - 2.0))
                } else {
                    None
                }
            }
            RadialLaw::Shell => Some(1.0),
            // E[R^2] = int r^2 p_R(r) dr, evaluated once numerically
            RadialLaw::CustomRadial => Some(custom_radial_mean_square()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        match self {
            RadialLaw::StudentT { nu } => {
                let f = FisherF::new(n as f64, *nu).expect("validated dof");
                (n as f64 * f.sample(rng)).sqrt()
            }
            RadialLaw::Shell => 1.0,
            RadialLaw::CustomRadial => {
                let u: f64 = rng.gen();
                custom_radial_inverse_cdf(u)
            }
        }
    }
}

/// CDF of the custom radial law: `F(r) = 1 - 2 e^4 / (e^{2r} + e^4)` on `r >= 2`.
pub fn custom_radial_cdf(r: f64) -> f64 {
    if r < 2.0 {
        0.0
    } else {
        1.0 - 2.0 * (4.0f64).exp() / ((2.0 * r).exp() + (4.0f64).exp())
    }
}

/// Exact inverse of [`custom_radial_cdf`].
pub fn custom_radial_inverse_cdf(u: f64) -> f64 {
    2.0 + 0.5 * ((1.0 + u) / (1.0 - u)).ln()
}

fn custom_radial_mean_square() -> f64 {
    // int_0^1 (F^{-1}(u))^2 du; the inverse CDF grows only logarithmically
    let gl = crate::quad::GaussLegendre::new(64);
    let mut total = gl.integrate(0.0, 0.5, |u| custom_radial_inverse_cdf(u).powi(2));
    let mut hi = 0.5f64;
    while hi > 1e-12 {
        let lo = hi / 2.0;
        total += gl.integrate(1.0 - hi, 1.0 - lo, |u| custom_radial_inverse_cdf(u).powi(2));
        hi = lo;
    }
    total
}

/// Sample a batch of elliptical vectors with the given radial law and
/// covariance parameter `Sigma_y`.
pub fn elliptical_sample<R: Rng + ?Sized>(
    radial: RadialLaw,
    cov: &CirculantCovariance,
    batch: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    radial.validate()?;
    let n = cov.n();
    let lambda = cov.sqrt_factor();
    let mut out = Array2::zeros((batch, n));
    let mut g = vec![0.0f64; n];
    for mut row in out.rows_mut() {
        loop {
            let mut norm_sq = 0.0;
            for v in g.iter_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
                norm_sq += *v * *v;
            }
            if norm_sq > 0.0 {
                let r = radial.draw(n, rng) / norm_sq.sqrt();
                for v in g.iter_mut() {
                    *v *= r;
                }
                break;
            }
        }
        // row = R * Lambda * u
        for (i, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &v) in g.iter().enumerate() {
                acc += lambda[(i, j)] * v;
            }
            *o = acc;
        }
    }
    Ok(out)
}
