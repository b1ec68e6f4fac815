//! Small dense DFT helpers for circulant matrices.
//!
//! A real circulant matrix with a reflection-symmetric first row is
//! diagonalized by the discrete Fourier basis with a purely real spectrum
//! `lambda_k = sum_d row[d] cos(2 pi k d / n)`. The dimensions used here are
//! tens to hundreds, so the O(n^2) direct transforms below beat the setup
//! cost and complexity of an FFT.

use ndarray::Array2;

/// Real eigenvalues of the circulant matrix with the given symmetric first row.
pub fn circulant_eigenvalues(row: &[f64]) -> Vec<f64> {
    let n = row.len();
    let mut eig = vec![0.0; n];
    for (k, e) in eig.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (d, &c) in row.iter().enumerate() {
            acc += c * (std::f64::consts::TAU * k as f64 * d as f64 / n as f64).cos();
        }
        *e = acc;
    }
    eig
}

/// First row of the circulant matrix with the given real spectrum
/// (inverse transform of `circulant_eigenvalues`).
pub fn circulant_row_from_eigenvalues(eig: &[f64]) -> Vec<f64> {
    let n = eig.len();
    let mut row = vec![0.0; n];
    for (d, c) in row.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &e) in eig.iter().enumerate() {
            acc += e * (std::f64::consts::TAU * k as f64 * d as f64 / n as f64).cos();
        }
        *c = acc / n as f64;
    }
    row
}

/// Dense circulant matrix `C[i][j] = row[(j - i) mod n]`.
pub fn circulant_matrix(row: &[f64]) -> Array2<f64> {
    let n = row.len();
    Array2::from_shape_fn((n, n), |(i, j)| row[(n + j - i) % n])
}

/// Dense symmetric Toeplitz matrix `T[i][j] = row[|i - j|]`.
pub fn toeplitz_matrix(row: &[f64]) -> Array2<f64> {
    let n = row.len();
    Array2::from_shape_fn((n, n), |(i, j)| row[i.abs_diff(j)])
}

/// Complex half-spectrum `W_k = sum_j w[j] exp(-2 pi i k j / n)` for
/// `k = 0..=n/2`, returned as (re, im) pairs.
pub fn half_spectrum(w: &[f64]) -> Vec<(f64, f64)> {
    let n = w.len();
    (0..=n / 2)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, &x) in w.iter().enumerate() {
                let ang = std::f64::consts::TAU * k as f64 * j as f64 / n as f64;
                re += x * ang.cos();
                im -= x * ang.sin();
            }
            (re, im)
        })
        .collect()
}
