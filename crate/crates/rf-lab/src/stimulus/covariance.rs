//! Translation-invariant covariance structures.
//!
//! Covariances of the stimulus ensembles are constant along (circular)
//! diagonals, so a single row identifies the whole matrix. The circulant
//! layout diagonalizes in the Fourier basis with a real spectrum; a literal
//! Toeplitz layout is kept behind a flag for fidelity checks against the
//! plain squared-exponential kernel, which is Toeplitz rather than circulant.

use ndarray::Array2;

use crate::dft;
use crate::error::{Error, Result};

/// Matrix structure implied by the stored first row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `C[i][j] = row[(j - i) mod n]`; requires `row[d] == row[n - d]`.
    Circulant,
    /// `T[i][j] = row[|i - j|]`.
    Toeplitz,
}

/// A covariance identified by its first row.
///
/// Entry `d` of the row is the covariance at (circular) lag `d`; the
/// diagonal value `row[0]` is the per-coordinate variance.
#[derive(Debug, Clone)]
pub struct CirculantCovariance {
    first_row: Vec<f64>,
    variance: f64,
    layout: Layout,
    psd_clip: f64,
}

/// Relative symmetry slack allowed when validating a circulant row.
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues may dip this far (times `n * variance`) below zero before the
/// row is rejected as non-PSD; anything smaller is clipped to zero.
const PSD_CLIP_TOL: f64 = 1e-6;

impl CirculantCovariance {
    /// Build a circulant covariance, validating reflection symmetry and
    /// positive semi-definiteness of the implied spectrum. Negative
    /// eigenvalues within the clip tolerance are treated as zero and their
    /// magnitude recorded in [`CirculantCovariance::psd_clip`].
    pub fn circulant(first_row: Vec<f64>) -> Result<Self> {
        let n = first_row.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "covariance dimension must be at least 2, got {n}"
            )));
        }
        let variance = first_row[0];
        if !(variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diagonal variance must be positive, got {variance}"
            )));
        }
        for d in 1..n {
            let (a, b) = (first_row[d], first_row[n - d]);
            if (a - b).abs() > SYMMETRY_TOL * variance {
                return Err(Error::InvalidParameter(format!(
                    "circulant first row is not reflection-symmetric at lag {d}: {a} vs {b}"
                )));
            }
        }
        let eig = dft::circulant_eigenvalues(&first_row);
        let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        Self::check_psd(min_eig, n, variance)?;
        Ok(CirculantCovariance {
            first_row,
            variance,
            layout: Layout::Circulant,
            psd_clip: (-min_eig).max(0.0),
        })
    }

    /// Build a symmetric Toeplitz covariance; PSD is checked with a dense
    /// symmetric eigendecomposition.
    pub fn toeplitz(first_row: Vec<f64>) -> Result<Self> {
        let n = first_row.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "covariance dimension must be at least 2, got {n}"
            )));
        }
        let variance = first_row[0];
        if !(variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diagonal variance must be positive, got {variance}"
            )));
        }
        let dense = dft::toeplitz_matrix(&first_row);
        let min_eig = dense_min_eigenvalue(&dense);
        Self::check_psd(min_eig, n, variance)?;
        Ok(CirculantCovariance {
            first_row,
            variance,
            layout: Layout::Toeplitz,
            psd_clip: (-min_eig).max(0.0),
        })
    }

    fn check_psd(min_eig: f64, n: usize, variance: f64) -> Result<()> {
        let tolerance = PSD_CLIP_TOL * n as f64 * variance;
        if min_eig < -tolerance {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: min_eig,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Magnitude of the most negative eigenvalue clipped to zero at
    /// construction (0 when the spectrum was already nonnegative).
    pub fn psd_clip(&self) -> f64 {
        self.psd_clip
    }

    /// Covariance at (circular) lag `d`.
    pub fn correlation(&self, d: usize) -> f64 {
        match self.layout {
            Layout::Circulant => self.first_row[d % self.n()],
            Layout::Toeplitz => self.first_row[d],
        }
    }

    /// Real spectrum, clipped at zero. Circulant layout only.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match self.layout {
            Layout::Circulant => Ok(dft::circulant_eigenvalues(&self.first_row)
                .into_iter()
                .map(|l| l.max(0.0))
                .collect()),
            Layout::Toeplitz => Err(Error::InvalidParameter(
                "Fourier eigenvalues are only defined for the circulant layout".into(),
            )),
        }
    }

    /// Dense n-by-n matrix.
    pub fn dense(&self) -> Array2<f64> {
        match self.layout {
            Layout::Circulant => dft::circulant_matrix(&self.first_row),
            Layout::Toeplitz => dft::toeplitz_matrix(&self.first_row),
        }
    }

    /// Matrix-vector product against the implied matrix.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(v.len(), n, "matvec dimension mismatch");
        let mut out = vec![0.0; n];
        match self.layout {
            Layout::Circulant => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &x) in v.iter().enumerate() {
                        acc += self.first_row[(n + j - i) % n] * x;
                    }
                    *o = acc;
                }
            }
            Layout::Toeplitz => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &x) in v.iter().enumerate() {
                        acc += self.first_row[i.abs_diff(j)] * x;
                    }
                    *o = acc;
                }
            }
        }
        out
    }

    /// Symmetric positive semi-definite square root `S` with `S S = C`.
    pub fn sqrt_factor(&self) -> Array2<f64> {
        match self.layout {
            Layout::Circulant => {
                let eig = dft::circulant_eigenvalues(&self.first_row);
                let sqrt_eig: Vec<f64> = eig.iter().map(|l| l.max(0.0).sqrt()).collect();
                let sqrt_row = dft::circulant_row_from_eigenvalues(&sqrt_eig);
                dft::circulant_matrix(&sqrt_row)
            }
            Layout::Toeplitz => dense_sqrt(&self.dense()),
        }
    }

    /// Symmetric inverse square root (only valid when all eigenvalues are
    /// strictly positive).
    pub fn inv_sqrt_factor(&self) -> Result<Array2<f64>> {
        match self.layout {
            Layout::Circulant => {
                let eig = dft::circulant_eigenvalues(&self.first_row);
                if let Some(idx) = eig.iter().position(|&l| l <= 0.0) {
                    return Err(Error::DegenerateSpectrum { index: idx });
                }
                let inv_sqrt: Vec<f64> = eig.iter().map(|l| 1.0 / l.sqrt()).collect();
                let row = dft::circulant_row_from_eigenvalues(&inv_sqrt);
                Ok(dft::circulant_matrix(&row))
            }
            Layout::Toeplitz => Err(Error::InvalidParameter(
                "inverse square root is only provided for the circulant layout".into(),
            )),
        }
    }
}

fn dense_min_eigenvalue(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    dm.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn dense_sqrt(m: &Array2<f64>) -> Array2<f64> {
    let n = m.nrows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = dm.symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (k, &l) in vals.iter().enumerate() {
                acc += eig.eigenvectors[(i, k)] * l * eig.eigenvectors[(j, k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Squared-exponential covariance `row[d] = exp(-d_eff^2 / xi^2)` with
/// `d_eff = min(d, n - d)` in the circular (default) layout and `d_eff = d`
/// in the literal Toeplitz layout.
pub fn sqexp_covariance(n: usize, xi: f64, circular: bool) -> Result<CirculantCovariance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "squared-exponential covariance needs n >= 2, got {n}"
        )));
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lengthscale must be positive, got {xi}"
        )));
    }
    let row: Vec<f64> = (0..n)
        .map(|d| {
            let d_eff = if circular { d.min(n - d) } else { d } as f64;
            (-(d_eff * d_eff) / (xi * xi)).exp()
        })
        .collect();
    if circular {
        CirculantCovariance::circulant(row)
    } else {
        CirculantCovariance::toeplitz(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tiny_lengthscale_is_identity() {
        let cov = sqexp_covariance(10, 1e-8, true).unwrap();
        assert_abs_diff_eq!(cov.first_row()[0], 1.0);
        for d in 1..10 {
            assert_abs_diff_eq!(cov.first_row()[d], 0.0);
        }
    }

    #[test]
    fn unit_diagonal_for_any_lengthscale() {
        for xi in [0.3, 1.0, 3.0, 5.0] {
            let cov = sqexp_covariance(40, xi, true).unwrap();
            assert_eq!(cov.first_row()[0], 1.0);
            assert_eq!(cov.variance(), 1.0);
        }
    }

    #[test]
    fn lengthscale_comparable_to_period_is_rejected() {
        // truncating the wrapped kernel to the nearest image breaks PSD once
        // the lengthscale is a sizable fraction of the ring
        assert!(matches!(
            sqexp_covariance(24, 7.5, true),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
    }

    #[test]
    fn dft_spectrum_matches_dense_eigendecomposition() {
        // brute-force oracle: dense symmetric eigenvalues of the full matrix
        let cov = sqexp_covariance(40, 3.0, true).unwrap();
        let dense = cov.dense();
        let dm = nalgebra::DMatrix::from_fn(40, 40, |i, j| dense[(i, j)]);
        let mut dense_eig: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().cloned().collect();
        let mut dft_eig = cov.eigenvalues().unwrap();
        dense_eig.sort_by(f64::total_cmp);
        dft_eig.sort_by(f64::total_cmp);
        for (a, b) in dense_eig.iter().zip(&dft_eig) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        assert!(dense_eig[0] > -1e-10, "squared-exponential kernel must be PSD");
    }

    #[test]
    fn sqrt_factor_squares_back() {
        let cov = sqexp_covariance(16, 2.0, true).unwrap();
        let s = cov.sqrt_factor();
        let back = s.dot(&s);
        let dense = cov.dense();
        for i in 0..16 {
            for j in 0..16 {
                assert_abs_diff_eq!(back[(i, j)], dense[(i, j)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn toeplitz_layout_keeps_literal_row() {
        let cov = sqexp_covariance(12, 2.0, false).unwrap();
        assert_eq!(cov.layout(), Layout::Toeplitz);
        for d in 0..12 {
            let expect = (-((d * d) as f64) / 4.0).exp();
            assert_abs_diff_eq!(cov.first_row()[d], expect);
        }
        let s = cov.sqrt_factor();
        let back = s.dot(&s);
        let dense = cov.dense();
        for i in 0..12 {
            for j in 0..12 {
                assert_abs_diff_eq!(back[(i, j)], dense[(i, j)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn asymmetric_row_rejected() {
        let row = vec![1.0, 0.5, 0.2, 0.1];
        assert!(CirculantCovariance::circulant(row).is_err());
    }

    #[test]
    fn indefinite_row_rejected() {
        // row of an indefinite symmetric circulant: alternating +-1 pattern is
        // fine, but a large negative lag-1 coefficient is not
        let row = vec![1.0, -0.9, -0.9];
        let err = CirculantCovariance::circulant(row).unwrap_err();
        assert!(matches!(err, Error::NotPositiveSemiDefinite { .. }));
    }

    #[test]
    fn matvec_agrees_with_dense() {
        let cov = sqexp_covariance(15, 2.5, true).unwrap();
        let v: Vec<f64> = (0..15).map(|i| (i as f64 * 0.7).sin()).collect();
        let direct = cov.matvec(&v);
        let dense = cov.dense();
        let vd = ndarray::Array1::from_vec(v);
        let expect = dense.dot(&vd);
        for i in 0..15 {
            assert_abs_diff_eq!(direct[i], expect[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn inv_sqrt_inverts_sqrt() {
        let cov = sqexp_covariance(12, 1.0, true).unwrap();
        let s = cov.sqrt_factor();
        let si = cov.inv_sqrt_factor().unwrap();
        let prod = s.dot(&si);
        for i in 0..12 {
            for j in 0..12 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)], expect, epsilon = 1e-8);
            }
        }
    }
}
