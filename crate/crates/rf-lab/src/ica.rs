//! Minimal FastICA baseline: fixed-point iteration with the logcosh
//! contrast and symmetric (parallel) decorrelation.
//!
//! ICA maximizes non-Gaussianity regardless of its sign, so it learns
//! localized filters on heavy-tailed (positive excess kurtosis) stimuli
//! where the trained networks do not. This module keeps just enough of the
//! algorithm to reproduce that contrast.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};

/// Data-to-whitened map and its inverse, retained for back-projection.
#[derive(Debug, Clone)]
pub struct Whitening {
    /// Row means subtracted before whitening.
    pub mean: Array1<f64>,
    /// `x_white = (x - mean) . map^T` (symmetric inverse square root of the
    /// sample covariance, so already-white data maps by the identity).
    pub map: Array2<f64>,
    /// Inverse map for `unwhiten`.
    pub unmap: Array2<f64>,
}

/// Eigenvalues of the sample covariance below this ratio of the largest are
/// treated as rank deficiency.
const RANK_TOL: f64 = 1e-12;

/// Center and whiten rows of `x` (samples by features): the output has
/// identity sample covariance. Errors on rank-deficient covariance.
pub fn whiten(x: &Array2<f64>) -> Result<(Array2<f64>, Whitening)> {
    let (samples, n) = x.dim();
    if samples <= n {
        return Err(Error::InvalidParameter(format!(
            "whitening needs more than {n} samples, got {samples}"
        )));
    }
    let mean = x.mean_axis(ndarray::Axis(0)).expect("nonempty");
    let centered = x - &mean.view().insert_axis(ndarray::Axis(0));
    // population-normalized covariance, matching the identity check
    let cov = centered.t().dot(&centered) / samples as f64;
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| cov[(i, j)]);
    let eig = dm.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if eig.eigenvalues.iter().any(|&l| l <= RANK_TOL * max_eig) {
        return Err(Error::RankDeficient);
    }
    let mut map = Array2::zeros((n, n));
    let mut unmap = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            let mut inv = 0.0;
            for k in 0..n {
                let basis = eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)];
                acc += basis / eig.eigenvalues[k].sqrt();
                inv += basis * eig.eigenvalues[k].sqrt();
            }
            map[(i, j)] = acc;
            unmap[(i, j)] = inv;
        }
    }
    let white = centered.dot(&map.t());
    Ok((white, Whitening { mean, map, unmap }))
}

impl Whitening {
    /// Undo the whitening (up to roundoff).
    pub fn unwhiten(&self, white: &Array2<f64>) -> Array2<f64> {
        white.dot(&self.unmap.t()) + &self.mean.view().insert_axis(ndarray::Axis(0))
    }
}

/// Contrast nonlinearity for the fixed-point update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Contrast {
    /// `g(u) = tanh(u)` (logcosh objective), the reference default.
    #[default]
    LogCosh,
    /// `g(u) = u^3` (kurtosis objective), kept behind this flag.
    Kurtosis,
}

impl Contrast {
    fn g(self, u: f64) -> f64 {
        match self {
            Contrast::LogCosh => u.tanh(),
            Contrast::Kurtosis => u * u * u,
        }
    }

    fn g_prime(self, u: f64) -> f64 {
        match self {
            Contrast::LogCosh => {
                let t = u.tanh();
                1.0 - t * t
            }
            Contrast::Kurtosis => 3.0 * u * u,
        }
    }
}

/// Options for [`fastica_with`].
#[derive(Debug, Clone)]
pub struct IcaOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub contrast: Contrast,
}

impl Default for IcaOptions {
    fn default() -> Self {
        IcaOptions { max_iter: 200, tol: 1e-4, contrast: Contrast::LogCosh }
    }
}

/// Unmixing filters recovered by FastICA.
#[derive(Debug, Clone)]
pub struct IcaResult {
    /// Components-by-features filters in input space (rows act on raw data).
    pub components: Array2<f64>,
    /// The same filters in whitened space; rows are orthonormal.
    pub whitened_components: Array2<f64>,
    pub n_iter: usize,
    /// False when the fixed-point iteration hit `max_iter` without settling;
    /// the components are still returned.
    pub converged: bool,
}

/// FastICA with the logcosh contrast and symmetric decorrelation.
pub fn fastica<R: Rng + ?Sized>(
    x: &Array2<f64>,
    n_components: usize,
    max_iter: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IcaResult> {
    fastica_with(x, n_components, &IcaOptions { max_iter, tol, ..Default::default() }, rng)
}

/// FastICA with explicit options.
pub fn fastica_with<R: Rng + ?Sized>(
    x: &Array2<f64>,
    n_components: usize,
    opts: &IcaOptions,
    rng: &mut R,
) -> Result<IcaResult> {
    let n = x.ncols();
    if n_components == 0 || n_components > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= components <= {n}, got {n_components}"
        )));
    }
    let (white, whitening) = whiten(x)?;
    let samples = white.nrows() as f64;

    let mut w = Array2::from_shape_fn((n_components, n), |_| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    w = symmetric_decorrelate(&w)?;

    let mut n_iter = opts.max_iter;
    let mut converged = false;
    for iter in 0..opts.max_iter {
        // u = W x, per sample and component
        let u = white.dot(&w.t());
        let mut w_new = Array2::zeros((n_components, n));
        for c in 0..n_components {
            let mut gp_mean = 0.0;
            let mut acc = Array1::<f64>::zeros(n);
            for (row, &ui) in white.rows().into_iter().zip(u.column(c)) {
                let g = opts.contrast.g(ui);
                gp_mean += opts.contrast.g_prime(ui);
                acc.scaled_add(g, &row.to_owned());
            }
            gp_mean /= samples;
            let mut newc = acc / samples;
            newc.scaled_add(-gp_mean, &w.row(c).to_owned());
            w_new.row_mut(c).assign(&newc);
        }
        let w_next = symmetric_decorrelate(&w_new)?;
        // max |1 - |<w_new, w_old>|| over components
        let drift = (0..n_components)
            .map(|c| {
                let dot: f64 = w_next.row(c).iter().zip(w.row(c)).map(|(a, b)| a * b).sum();
                (1.0 - dot.abs()).abs()
            })
            .fold(0.0, f64::max);
        w = w_next;
        if drift < opts.tol {
            n_iter = iter + 1;
            converged = true;
            break;
        }
    }

    let components = w.dot(&whitening.map);
    Ok(IcaResult { components, whitened_components: w, n_iter, converged })
}

/// `W <- (W W^T)^{-1/2} W`, making the rows exactly orthonormal.
fn symmetric_decorrelate(w: &Array2<f64>) -> Result<Array2<f64>> {
    let c = w.nrows();
    let gram = w.dot(&w.t());
    let dm = nalgebra::DMatrix::from_fn(c, c, |i, j| gram[(i, j)]);
    let eig = dm.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::RankDeficient);
    }
    let mut inv_sqrt = Array2::zeros((c, c));
    for i in 0..c {
        for j in 0..c {
            let mut acc = 0.0;
            for k in 0..c {
                acc += eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)]
                    / eig.eigenvalues[k].sqrt();
            }
            inv_sqrt[(i, j)] = acc;
        }
    }
    Ok(inv_sqrt.dot(w))
}

/// Canonicalize away the permutation/sign ambiguity for comparisons: sort
/// components by peak index and flip signs so each peak is positive.
pub fn canonicalize_components(components: &mut Array2<f64>) {
    let mut rows: Vec<Vec<f64>> = components.rows().into_iter().map(|r| r.to_vec()).collect();
    for row in rows.iter_mut() {
        let peak = crate::metrics::peak_index(row).unwrap_or(0);
        if row[peak] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }
    rows.sort_by_key(|row| crate::metrics::peak_index(row).unwrap_or(0));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            components[(i, j)] = v;
        }
    }
}
