//! Quadrature rules used by the statistical oracles and the amplifier.
//!
//! Gauss-Hermite handles Gaussian expectations; Gauss-Legendre panels with
//! geometric refinement toward the endpoints handle unit-interval integrands
//! with algebraic endpoint singularities (the heavy-tailed quantile moments).

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least two nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Hermite rule for integrals of the form `int exp(-x^2) f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch: eigendecompose the symmetric tridiagonal Jacobi matrix
    /// with off-diagonal sqrt(k/2); weights are sqrt(pi) times the squared
    /// first components of the eigenvectors.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least two nodes");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let v0 = eig.eigenvectors[(0, i)];
                (x, PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `int exp(-x^2) f(x) dx` over the real line.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Expectation `E[f(Z)]` for `Z ~ N(0, sigma^2)`.
    pub fn expect<F: Fn(f64) -> f64>(&self, sigma: f64, f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sigma;
        self.integrate(|x| f(scale * x)) / PI.sqrt()
    }

    /// Expectation `E[f(U, V)]` for standard bivariate normal (U, V) with
    /// correlation `rho`, via the tensor rule on U and W with
    /// `V = rho U + sqrt(1 - rho^2) W`.
    pub fn expect_bivariate<F: Fn(f64, f64) -> f64>(&self, rho: f64, f: F) -> f64 {
        let s = (1.0 - rho * rho).max(0.0).sqrt();
        let c = std::f64::consts::SQRT_2;
        let mut acc = 0.0;
        for (&xu, &wu) in self.nodes.iter().zip(&self.weights) {
            let u = c * xu;
            let mut inner = 0.0;
            for (&xw, &ww) in self.nodes.iter().zip(&self.weights) {
                let v = rho * u + s * c * xw;
                inner += ww * f(u, v);
            }
            acc += wu * inner;
        }
        acc / PI
    }
}

static GH200: OnceLock<GaussHermite> = OnceLock::new();
static GH128: OnceLock<GaussHermite> = OnceLock::new();

/// Shared 200-node Gauss-Hermite rule (the amplifier's workhorse).
pub fn gauss_hermite_200() -> &'static GaussHermite {
    GH200.get_or_init(|| GaussHermite::new(200))
}

/// Shared 128-node rule for bivariate (copula covariance) expectations.
pub fn gauss_hermite_128() -> &'static GaussHermite {
    GH128.get_or_init(|| GaussHermite::new(128))
}

/// Integral of `f` over (0, 1) for integrands with integrable algebraic
/// singularities at either endpoint: fixed panels on the bulk plus
/// geometrically shrinking panels toward 0 and 1, stopping once a panel
/// contributes less than `tol` or the panel width reaches `cutoff`.
pub fn integrate_unit_refined<F: Fn(f64) -> f64>(f: F, tol: f64, cutoff: f64) -> f64 {
    let gl = GaussLegendre::new(32);
    let mut total = gl.integrate(0.25, 0.75, &f);
    // Panels [2^-(m+1), 2^-m] toward 0 and their mirror images toward 1.
    for toward_zero in [true, false] {
        let mut hi = 0.25;
        loop {
            let lo = hi / 2.0;
            let (a, b) = if toward_zero {
                (lo, hi)
            } else {
                (1.0 - hi, 1.0 - lo)
            };
            let piece = gl.integrate(a, b, &f);
            total += piece;
            hi = lo;
            if (piece.abs() < tol && hi < 1e-3) || hi < cutoff {
                break;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is exact for an 8-node rule
        let val = gl.integrate(-1.0, 1.0, |x| x.powi(14));
        assert_abs_diff_eq!(val, 2.0 / 15.0, epsilon = 1e-14);
        let shifted = gl.integrate(0.0, 2.0, |x| 3.0 * x * x);
        assert_abs_diff_eq!(shifted, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn hermite_matches_gaussian_moments() {
        let gh = GaussHermite::new(40);
        assert_abs_diff_eq!(gh.integrate(|_| 1.0), PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(gh.expect(1.0, |z| z * z), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gh.expect(2.0, |z| z * z), 4.0, epsilon = 1e-11);
        assert_abs_diff_eq!(gh.expect(1.0, |z| z.powi(4)), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(gh.expect(1.0, |z| z.powi(6)), 15.0, epsilon = 1e-10);
    }

    #[test]
    fn hermite_200_node_rule_is_stable() {
        let gh = gauss_hermite_200();
        assert_abs_diff_eq!(gh.expect(1.0, |z| z * z), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(gh.expect(1.0, |z| (-z * z / 2.0).exp()), (0.5f64).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn bivariate_rule_reproduces_correlation() {
        let gh = gauss_hermite_128();
        for rho in [-0.7, 0.0, 0.35, 0.9] {
            assert_abs_diff_eq!(gh.expect_bivariate(rho, |u, v| u * v), rho, epsilon = 1e-10);
            assert_abs_diff_eq!(gh.expect_bivariate(rho, |_, v| v * v), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn refined_unit_integral_handles_endpoint_singularity() {
        // int_0^1 u^(-1/2) du = 2, singular at 0; truncation at the cutoff
        // leaves a 2 sqrt(cutoff) tail
        let val = integrate_unit_refined(|u| u.powf(-0.5), 1e-14, 1e-14);
        assert_abs_diff_eq!(val, 2.0, epsilon = 5e-7);
        // int_0^1 (1-u)^(-1/3) du = 3/2, singular at 1
        let val = integrate_unit_refined(|u| (1.0 - u).powf(-1.0 / 3.0), 1e-14, 1e-14);
        assert_abs_diff_eq!(val, 1.5, epsilon = 1e-9);
    }
}
