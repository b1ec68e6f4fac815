//! One-dimensional ferromagnetic Ising chain with periodic boundary.
//!
//! The sampler is a site-sweep heat-bath Gibbs chain for
//! `p(x) ~ exp(J sum_i x_i x_{i+1})` with `x_{N+1} = x_1`. The coupling is
//! exposed ferromagnetically: larger `J` gives longer positive correlation
//! lengthscales. The exact periodic-chain pair correlation
//! `(t^d + t^{n-d}) / (1 + t^n)`, `t = tanh J`, serves as the validation
//! oracle throughout.

use ndarray::Array2;
use rand::Rng;

use crate::stimulus::covariance::CirculantCovariance;

/// Default burn-in, in full site sweeps, for a fresh chain.
pub fn default_burn_in_sweeps(n: usize) -> usize {
    20 * n
}

/// Default number of full site sweeps between retained samples of a
/// persistent chain.
pub fn default_thin_sweeps(n: usize) -> usize {
    2 * n
}

/// Exact pair correlation `E[x_i x_{i+d}]` of the periodic chain.
pub fn ising_pair_correlation_exact(n: usize, j_eff: f64, d: usize) -> f64 {
    assert!(d <= n, "lag must satisfy 0 <= d <= n");
    let t = j_eff.tanh();
    (t.powi(d as i32) + t.powi((n - d) as i32)) / (1.0 + t.powi(n as i32))
}

/// Analytic covariance of the chain (unit diagonal).
pub fn ising_covariance(n: usize, j: f64) -> CirculantCovariance {
    let row: Vec<f64> = (0..n).map(|d| ising_pair_correlation_exact(n, j, d)).collect();
    CirculantCovariance::circulant(row).expect("transfer-matrix covariance is PSD")
}

/// A running Gibbs chain over spin configurations.
///
/// Heat-bath acceptance uses three precomputed u32 thresholds, one per local
/// field value `x_{i-1} + x_{i+1} in {-2, 0, 2}`, so a single uniform u32
/// decides each spin. Randomness is drawn in blocks: sweeping dominates the
/// stimulus budget, so the inner loop stays free of per-call generator
/// overhead and of modular index arithmetic.
pub struct IsingChain {
    spins: Vec<i8>,
    thresholds: [u32; 3],
    n: usize,
    buf: Vec<u32>,
    buf_pos: usize,
}

impl IsingChain {
    /// Start a chain from uniformly random spins and run `burn_in_sweeps`
    /// full sweeps.
    pub fn new<R: Rng + ?Sized>(n: usize, j: f64, burn_in_sweeps: usize, rng: &mut R) -> Self {
        assert!(n >= 2, "chain length must be at least 2");
        let spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut thresholds = [0u32; 3];
        for (idx, h) in [-2.0f64, 0.0, 2.0].into_iter().enumerate() {
            // P(x_i = +1 | neighbors) = 1 / (1 + exp(-2 J h))
            let p = 1.0 / (1.0 + (-2.0 * j * h).exp());
            thresholds[idx] = (p * 4294967296.0).min(u32::MAX as f64) as u32;
        }
        let buf_len = 4096usize.max(n);
        let mut chain =
            IsingChain { spins, thresholds, n, buf: vec![0u32; buf_len], buf_pos: buf_len };
        for _ in 0..burn_in_sweeps {
            chain.sweep(rng);
        }
        chain
    }

    #[inline]
    fn refill<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        // one block-generation call per buffer instead of one per draw
        let bytes = bytemuck_cast_mut(&mut self.buf);
        rng.fill_bytes(bytes);
        self.buf_pos = 0;
    }

    /// One full sequential pass of single-site heat-bath updates.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.n;
        if self.buf_pos + n > self.buf.len() {
            self.refill(rng);
        }
        let draws = &self.buf[self.buf_pos..self.buf_pos + n];
        self.buf_pos += n;
        let thresholds = self.thresholds;
        let spins = &mut self.spins;
        let flip = |left: i8, right: i8, draw: u32| -> i8 {
            let field_index = ((left + right) / 2 + 1) as usize;
            if draw < thresholds[field_index] {
                1
            } else {
                -1
            }
        };
        spins[0] = flip(spins[n - 1], spins[1], draws[0]);
        for i in 1..n - 1 {
            spins[i] = flip(spins[i - 1], spins[i + 1], draws[i]);
        }
        spins[n - 1] = flip(spins[n - 2], spins[0], draws[n - 1]);
    }

    /// Advance `thin_sweeps` sweeps and copy the configuration into `out`.
    pub fn fill_sample<R: Rng + ?Sized>(&mut self, thin_sweeps: usize, out: &mut [f64], rng: &mut R) {
        for _ in 0..thin_sweeps {
            self.sweep(rng);
        }
        for (o, &s) in out.iter_mut().zip(&self.spins) {
            *o = s as f64;
        }
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }
}

/// View a u32 buffer as bytes for bulk randomness generation.
fn bytemuck_cast_mut(buf: &mut [u32]) -> &mut [u8] {
    // u32 has no invalid bit patterns and alignment only shrinks
    unsafe { std::slice::from_raw_parts_mut(buf.as_mut_ptr() as *mut u8, buf.len() * 4) }
}

/// Draw one configuration from a fresh chain after `sweeps` full passes.
///
/// `sweeps` must be at least the default burn-in of `20 n` sweeps.
pub fn ising_sample<R: Rng + ?Sized>(n: usize, j: f64, sweeps: usize, rng: &mut R) -> Vec<f64> {
    assert!(
        sweeps >= default_burn_in_sweeps(n),
        "sweeps = {sweeps} below the burn-in default {}",
        default_burn_in_sweeps(n)
    );
    let chain = IsingChain::new(n, j, sweeps, rng);
    chain.spins.iter().map(|&s| s as f64).collect()
}

/// Draw a batch from one persistent chain: burn in once, then retain a
/// configuration every `thin_sweeps` sweeps.
pub fn ising_batch<R: Rng + ?Sized>(
    n: usize,
    j: f64,
    burn_in_sweeps: usize,
    thin_sweeps: usize,
    batch: usize,
    rng: &mut R,
) -> Array2<f64> {
    let mut chain = IsingChain::new(n, j, burn_in_sweeps, rng);
    let mut out = Array2::zeros((batch, n));
    for mut row in out.rows_mut() {
        chain.fill_sample(thin_sweeps, row.as_slice_mut().expect("contiguous row"), rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::root;
    use approx::assert_abs_diff_eq;

    /// Brute-force oracle: expectation of x_0 x_d over all 2^n configurations
    /// weighted by exp(J sum x_i x_{i+1}).
    fn enumerate_pair_correlation(n: usize, j: f64, d: usize) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for mask in 0u32..(1 << n) {
            let spin = |i: usize| -> f64 {
                if mask >> (i % n) & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            };
            let mut energy = 0.0;
            for i in 0..n {
                energy += spin(i) * spin(i + 1);
            }
            let w = (j * energy).exp();
            num += w * spin(0) * spin(d);
            den += w;
        }
        num / den
    }

    #[test]
    fn transfer_matrix_formula_matches_exhaustive_enumeration() {
        for n in [8, 10, 12] {
            for j in [0.2, 0.7, 1.2] {
                for d in 0..=n / 2 {
                    let exact = ising_pair_correlation_exact(n, j, d);
                    let brute = enumerate_pair_correlation(n, j, d);
                    assert_abs_diff_eq!(exact, brute, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn transfer_matrix_trivial_values() {
        assert_abs_diff_eq!(ising_pair_correlation_exact(50, 0.9, 0), 1.0);
        assert_abs_diff_eq!(ising_pair_correlation_exact(50, 0.0, 1), 0.0);
        assert_abs_diff_eq!(
            ising_pair_correlation_exact(1000, 0.7, 1),
            0.7f64.tanh(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(ising_pair_correlation_exact(1000, 0.7, 1), 0.60437, epsilon = 1e-5);
    }

    #[test]
    fn samples_are_spins() {
        let mut rng = root(11);
        let x = ising_sample(16, 0.7, default_burn_in_sweeps(16), &mut rng);
        assert_eq!(x.len(), 16);
        for v in x {
            assert_eq!(v * v, 1.0);
        }
    }

    /// Per-sample mean of the lag-d spin product, averaged over samples; the
    /// standard error comes from the spread of the per-sample means.
    fn lag_correlation_with_se(samples: &Array2<f64>, d: usize) -> (f64, f64) {
        let (m, n) = samples.dim();
        let stats: Vec<f64> = samples
            .rows()
            .into_iter()
            .map(|row| (0..n).map(|i| row[i] * row[(i + d) % n]).sum::<f64>() / n as f64)
            .collect();
        let mean = stats.iter().sum::<f64>() / m as f64;
        let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / m as f64;
        (mean, (var / m as f64).sqrt())
    }

    #[test]
    fn uncoupled_chain_has_independent_spins() {
        let mut rng = root(5);
        let batch = ising_batch(20, 0.0, default_burn_in_sweeps(20), default_thin_sweeps(20), 4000, &mut rng);
        let (c1, se) = lag_correlation_with_se(&batch, 1);
        assert!(c1.abs() < 4.0 * se.max(1e-3), "lag-1 correlation {c1} not ~0 (se {se})");
    }

    #[test]
    fn gibbs_matches_transfer_matrix_oracle() {
        let n = 24;
        let mut rng = root(42);
        let batch = ising_batch(n, 0.7, default_burn_in_sweeps(n), default_thin_sweeps(n), 6000, &mut rng);
        for d in 1..=6 {
            let (c, se) = lag_correlation_with_se(&batch, d);
            let exact = ising_pair_correlation_exact(n, 0.7, d);
            assert!(
                (c - exact).abs() < 3.0 * se,
                "lag {d}: sampled {c} vs exact {exact} (se {se})"
            );
        }
    }

    #[test]
    fn thinned_samples_are_decorrelated() {
        // justification for the burn-in/thinning defaults: successive thinned
        // samples should have negligible autocorrelation in a slow statistic
        let n = 30;
        let mut rng = root(3);
        let batch = ising_batch(n, 1.2, default_burn_in_sweeps(n), default_thin_sweeps(n), 4000, &mut rng);
        let stat: Vec<f64> = batch
            .rows()
            .into_iter()
            .map(|row| (0..n).map(|i| row[i] * row[(i + 1) % n]).sum::<f64>() / n as f64)
            .collect();
        let m = stat.len();
        let mean = stat.iter().sum::<f64>() / m as f64;
        let var = stat.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / m as f64;
        let lag1: f64 = (0..m - 1)
            .map(|i| (stat[i] - mean) * (stat[i + 1] - mean))
            .sum::<f64>()
            / ((m - 1) as f64 * var);
        assert!(lag1.abs() < 4.0 / (m as f64).sqrt(), "chain autocorrelation {lag1} too large");
    }

    #[test]
    fn covariance_is_psd_and_unit_diagonal() {
        let cov = ising_covariance(40, 1.2);
        assert_abs_diff_eq!(cov.variance(), 1.0);
        assert!(cov.eigenvalues().unwrap().iter().all(|&l| l >= 0.0));
    }
}
