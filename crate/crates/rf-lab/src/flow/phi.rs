//! The amplifier nonlinearity and its cubic Taylor surrogate.
//!
//! For a symmetric marginal X the amplifier is
//!
//! ```text
//! phi(a) = E[ X erf( X alg^{-1}(a) / sqrt(2) ) ],   a in (-1, 1),
//! ```
//!
//! with `alg(x) = x / sqrt(1 + x^2)`. Near zero every marginal looks like
//! the same line `sqrt(2/pi) m2 a`; the cubic term
//! `sqrt(2/pi) (3 m2 - m4) / 6` carries the kurtosis dependence: negative
//! excess kurtosis makes phi super-linear (which amplifies local maxima of
//! the weight into a localized bump), positive excess kurtosis makes it
//! sub-linear.

use crate::error::{Error, Result};
use crate::flow::marginal::MarginalSpec;
use crate::quad::{gauss_hermite_200, integrate_unit_refined};
use crate::stimulus::kur::alg_k_cdf_inverse;

/// Algebraic sigmoid `x / sqrt(1 + x^2)`.
pub fn alg(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// Inverse `a / sqrt(1 - a^2)`; domain error outside (-1, 1).
pub fn alg_inv(a: f64) -> Result<f64> {
    if !(a.abs() < 1.0) {
        return Err(Error::AmplifierDomain { a });
    }
    Ok(a / (1.0 - a * a).sqrt())
}

/// Evaluate the amplifier at `a`.
///
/// Exact for the two-point kind; 200-node Gauss-Hermite for the Gaussian
/// (switching to the complementary-erfc form once the error function
/// saturates on the Gaussian scale, where a fixed rule can no longer resolve
/// the transition); endpoint-refined quantile quadrature for the `alg_k`
/// kind; sample mean for the empirical kind (the integrand `x erf(c x)` is
/// even, so magnitudes suffice).
pub fn phi(marginal: &MarginalSpec, a: f64) -> Result<f64> {
    let c = alg_inv(a)? / std::f64::consts::SQRT_2;
    Ok(match marginal {
        MarginalSpec::TwoPoint { v } => v * libm::erf(v * c),
        MarginalSpec::Gaussian { sigma } => gaussian_amplifier(*sigma, c),
        MarginalSpec::AlgSigmoid { k, scale } => integrate_unit_refined(
            |u| {
                let x = scale * alg_k_cdf_inverse(u, *k).expect("u in (0,1)");
                x * libm::erf(c * x)
            },
            1e-13,
            1e-14,
        ),
        MarginalSpec::Empirical { abs_samples } => {
            abs_samples.iter().map(|&x| x * libm::erf(c * x)).sum::<f64>()
                / abs_samples.len() as f64
        }
    })
}

/// `E[X erf(c X)]` for `X ~ N(0, sigma^2)`.
///
/// For `|c| sigma <= 1` the plain Gauss-Hermite rule resolves the integrand.
/// Beyond that, `erf` saturates within a fraction of the Gaussian width, so
/// the expectation is split as `E[|X|] - 2 int_0^inf x erfc(|c| x) p(x) dx`
/// and the correction evaluated in the rescaled variable `y = |c| x`, where
/// `y erfc(y)` has unit scale and the Gaussian factor varies slowly.
fn gaussian_amplifier(sigma: f64, c: f64) -> f64 {
    if c.abs() * sigma <= 1.0 {
        return gauss_hermite_200().expect(sigma, |x| x * libm::erf(c * x));
    }
    let ca = c.abs();
    let gl = crate::quad::GaussLegendre::new(64);
    let density = |x: f64| {
        (-0.5 * (x / sigma) * (x / sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    // y erfc(y) is negligible past y = 10
    let correction = 2.0 / (ca * ca)
        * gl.integrate(0.0, 10.0, |y| y * libm::erfc(y) * density(y / ca));
    let mean_abs = sigma * (2.0 / std::f64::consts::PI).sqrt();
    (mean_abs - correction) * c.signum()
}

/// Cubic surrogate `c1 a + c3 a^3` of the amplifier about zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorAmplifier {
    /// `phi'(0) = sqrt(2/pi) m2`.
    pub c1: f64,
    /// `phi'''(0) / 3! = sqrt(2/pi) (3 m2 - m4) / 6`.
    pub c3: f64,
}

impl TaylorAmplifier {
    pub fn eval(&self, a: f64) -> f64 {
        self.c1 * a + self.c3 * a * a * a
    }

    /// `phi'''(0)` implied by the stored cubic coefficient.
    pub fn third_derivative(&self) -> f64 {
        6.0 * self.c3
    }
}

/// Third-order Taylor coefficients of the amplifier; heavy-tailed marginals
/// without a fourth moment have no surrogate.
pub fn phi_taylor3(marginal: &MarginalSpec) -> Result<TaylorAmplifier> {
    let m2 = marginal.m2();
    let m4 = match marginal.m4() {
        Ok(v) => v,
        Err(Error::DivergentMoment { k, .. }) => return Err(Error::UndefinedSurrogate { k }),
        Err(e) => return Err(e),
    };
    let root = (2.0 / std::f64::consts::PI).sqrt();
    Ok(TaylorAmplifier { c1: root * m2, c3: root * (3.0 * m2 - m4) / 6.0 })
}

/// Dense odd tabulation of the amplifier with cubic Hermite interpolation,
/// for integrations where per-step quadrature would dominate the runtime.
#[derive(Debug, Clone)]
pub struct AmplifierTable {
    a_max: f64,
    step: f64,
    /// Values on the uniform grid `0, step, ..., a_max`.
    values: Vec<f64>,
}

impl AmplifierTable {
    /// Tabulate `phi` for the marginal on `[0, a_max]` with `points` nodes;
    /// odd symmetry supplies the negative half.
    pub fn tabulate(marginal: &MarginalSpec, points: usize, a_max: f64) -> Result<Self> {
        if !(0.0 < a_max && a_max < 1.0) || points < 8 {
            return Err(Error::InvalidParameter(
                "amplifier table needs a_max in (0,1) and at least 8 points".into(),
            ));
        }
        let step = a_max / (points - 1) as f64;
        let values = (0..points)
            .map(|i| phi(marginal, i as f64 * step))
            .collect::<Result<Vec<f64>>>()?;
        Ok(AmplifierTable { a_max, step, values })
    }

    /// Interpolated amplifier value; arguments beyond the tabulated range
    /// clamp to the endpoint value.
    pub fn eval(&self, a: f64) -> f64 {
        let sign = if a < 0.0 { -1.0 } else { 1.0 };
        let x = a.abs().min(self.a_max);
        let pos = x / self.step;
        let i = (pos as usize).min(self.values.len() - 2);
        let t = pos - i as f64;
        // Catmull-Rom slopes; odd reflection supplies the node below zero
        let n = self.values.len();
        let vm1 = if i == 0 { -self.values[1] } else { self.values[i - 1] };
        let v0 = self.values[i];
        let v1 = self.values[i + 1];
        let v2 = if i + 2 < n { self.values[i + 2] } else { 2.0 * v1 - v0 };
        let m0 = 0.5 * (v1 - vm1);
        let m1 = 0.5 * (v2 - v0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        sign * (h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn alg_round_trip_and_values() {
        assert_abs_diff_eq!(alg(0.0), 0.0);
        assert_abs_diff_eq!(alg_inv(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(alg(1.0), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        // the round trip is conditioning-limited: representing alg(x) costs
        // a relative error ~ eps x^2, so demand 1e-12 only on moderate x
        for i in -20..=20 {
            let x = 2.5 * i as f64;
            assert_abs_diff_eq!(alg_inv(alg(x)).unwrap(), x, epsilon = 1e-12 * x.abs().max(1.0));
        }
        for i in -20..=20 {
            let x = 50.0 * i as f64;
            assert_abs_diff_eq!(alg_inv(alg(x)).unwrap(), x, epsilon = 1e-9 * x.abs().max(1.0));
        }
        assert!(alg_inv(1.0).is_err());
        assert!(alg_inv(-1.2).is_err());
    }

    #[test]
    fn two_point_amplifier_collapses_to_erf() {
        let tp = MarginalSpec::two_point(1.0).unwrap();
        for a in [-0.9, -0.3, 0.0, 0.5, 0.99] {
            let expect = libm::erf(alg_inv(a).unwrap() / std::f64::consts::SQRT_2);
            assert_abs_diff_eq!(phi(&tp, a).unwrap(), expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn gaussian_amplifier_matches_stein_closed_form() {
        // E[X erf(c X)] = (2/sqrt(pi)) c sigma^2 / sqrt(1 + 2 c^2 sigma^2)
        for sigma in [0.7, 1.0, 1.8] {
            let g = MarginalSpec::gaussian(sigma).unwrap();
            for a in [-0.99, -0.4, 0.1, 0.8, 0.99] {
                let c = alg_inv(a).unwrap() / std::f64::consts::SQRT_2;
                let closed = 2.0 / std::f64::consts::PI.sqrt() * c * sigma * sigma
                    / (1.0 + 2.0 * c * c * sigma * sigma).sqrt();
                assert_abs_diff_eq!(phi(&g, a).unwrap(), closed, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn unit_gaussian_amplifier_is_exactly_linear() {
        let g = MarginalSpec::gaussian(1.0).unwrap();
        let slope = (2.0 / std::f64::consts::PI).sqrt();
        for i in 0..100 {
            let a = -0.99 + 0.02 * i as f64;
            assert_abs_diff_eq!(phi(&g, a).unwrap(), slope * a, epsilon = 1e-6);
        }
    }

    #[test]
    fn amplifier_is_odd_for_every_kind() {
        let samples: Vec<f64> = (0..20_000).map(|i| ((i as f64) * 0.37).sin() * 1.3).collect();
        let specs = [
            MarginalSpec::two_point(0.8).unwrap(),
            MarginalSpec::gaussian(1.1).unwrap(),
            MarginalSpec::alg_sigmoid(6.0, 0.8).unwrap(),
            MarginalSpec::empirical(&samples).unwrap(),
        ];
        for s in &specs {
            for a in [0.1, 0.45, 0.9] {
                let plus = phi(s, a).unwrap();
                let minus = phi(s, -a).unwrap();
                assert_abs_diff_eq!(plus, -minus, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn amplifier_is_strictly_increasing() {
        let specs = [
            MarginalSpec::two_point(1.0).unwrap(),
            MarginalSpec::gaussian(1.0).unwrap(),
            MarginalSpec::alg_sigmoid(10.0, 1.0).unwrap(),
        ];
        for s in &specs {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..199 {
                let a = -0.99 + i as f64 * 0.01;
                let v = phi(s, a).unwrap();
                assert!(v > prev, "{} not increasing at a = {a}", s.kind_name());
                prev = v;
            }
        }
    }

    #[test]
    fn taylor_coefficients_from_moments() {
        let root = (2.0 / std::f64::consts::PI).sqrt();
        // two-point: m2 = m4 = 1 -> phi'''(0) = +2 sqrt(2/pi), super-linear
        let t = phi_taylor3(&MarginalSpec::two_point(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(t.c1, root, epsilon = 1e-14);
        assert_abs_diff_eq!(t.third_derivative(), 2.0 * root, epsilon = 1e-12);
        // unit gaussian: m4 = 3 m2^2 -> exactly linear surrogate
        let t = phi_taylor3(&MarginalSpec::gaussian(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(t.c3, 0.0, epsilon = 1e-14);
        // heavy tail: no surrogate
        assert!(matches!(
            phi_taylor3(&MarginalSpec::alg_sigmoid(3.0, 1.0).unwrap()),
            Err(Error::UndefinedSurrogate { .. })
        ));
    }

    #[test]
    fn taylor_matches_finite_differences_of_phi() {
        // five-point central stencils at h = 1e-2; the raw third-derivative
        // stencil carries an h^2 phi^(5)/4 truncation (~2e-4 relative here),
        // so one Richardson step removes it
        let specs = [
            MarginalSpec::two_point(1.0).unwrap(),
            MarginalSpec::gaussian(1.0).unwrap(),
            MarginalSpec::alg_sigmoid(10.0, 1.0).unwrap(),
        ];
        let h = 1e-2;
        for s in &specs {
            let t = phi_taylor3(s).unwrap();
            let f = |a: f64| phi(s, a).unwrap();
            let d1 = (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
            let d3_stencil = |h: f64| {
                (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h)
            };
            let d3 = (4.0 * d3_stencil(h / 2.0) - d3_stencil(h)) / 3.0;
            assert!(
                (d1 - t.c1).abs() <= 1e-4 * t.c1.abs(),
                "{}: phi'(0) fd {d1} vs moments {}",
                s.kind_name(),
                t.c1
            );
            let d3_expect = t.third_derivative();
            let tol = 1e-4 * d3_expect.abs().max(1e-6);
            assert!(
                (d3 - d3_expect).abs() <= tol,
                "{}: phi'''(0) fd {d3} vs moments {d3_expect}",
                s.kind_name()
            );
        }
    }

    #[test]
    fn small_argument_slope_matches_m2_for_all_kinds() {
        let samples: Vec<f64> = (0..40_000).map(|i| ((i as f64) * 0.61).sin() * 0.9).collect();
        let specs = [
            MarginalSpec::two_point(1.2).unwrap(),
            MarginalSpec::gaussian(0.9).unwrap(),
            MarginalSpec::alg_sigmoid(8.0, 1.1).unwrap(),
            MarginalSpec::empirical(&samples).unwrap(),
        ];
        let root = (2.0 / std::f64::consts::PI).sqrt();
        for s in &specs {
            let a = 1e-4;
            let slope = phi(s, a).unwrap() / a;
            assert!(
                (slope - root * s.m2()).abs() < 1e-4 * s.m2(),
                "{}: slope {slope} vs {}",
                s.kind_name(),
                root * s.m2()
            );
        }
    }

    #[test]
    fn table_interpolation_tracks_phi() {
        let s = MarginalSpec::alg_sigmoid(10.0, 1.0).unwrap();
        let table = AmplifierTable::tabulate(&s, 513, 1.0 - 1e-6).unwrap();
        for i in 0..200 {
            let a = -0.995 + i as f64 * 0.01;
            let direct = phi(&s, a).unwrap();
            assert_abs_diff_eq!(table.eval(a), direct, epsilon = 1e-6);
        }
    }
}
