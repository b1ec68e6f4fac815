//! Localization measures and distributional diagnostics.

use crate::dft;
use crate::error::{Error, Result};

/// Inverse participation ratio `(sum w_i^4) / (sum w_i^2)^2`.
///
/// Scale-invariant concentration measure in `[1/n, 1]`: 1 for a one-hot
/// vector, `1/n` for a uniform one.
pub fn ipr(w: &[f64]) -> Result<f64> {
    let sum_sq: f64 = w.iter().map(|v| v * v).sum();
    if sum_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sum_quad: f64 = w.iter().map(|v| v.powi(4)).sum();
    Ok(sum_quad / (sum_sq * sum_sq))
}

/// Excess kurtosis `m4 / m2^2 - 3` with central sample moments
/// (population normalization, so +-1 equal-mass samples give exactly -2).
pub fn excess_kurtosis(samples: &[f64]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "excess kurtosis needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in samples {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::InvalidParameter("zero variance: kurtosis undefined".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// A single-frequency fit `a cos(2 pi k x) + b sin(2 pi k x)` on the grid
/// `x = i / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    /// `||w - fit||_2 / ||w||_2`.
    pub rel_residual: f64,
}

/// Fit the single dominant frequency: `k` is the magnitude argmax of the
/// half-spectrum (mean component included as `k = 0`), then least squares
/// for the amplitudes at that frequency.
pub fn sinusoid_fit(w: &[f64]) -> Result<SinusoidFit> {
    let n = w.len();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("sinusoid fit needs n >= 4, got {n}")));
    }
    let spectrum = dft::half_spectrum(w);
    let mut k = 0;
    let mut best = f64::NEG_INFINITY;
    for (idx, (re, im)) in spectrum.iter().enumerate() {
        let mag = re * re + im * im;
        if mag > best {
            best = mag;
            k = idx;
        }
    }
    let (cos_basis, sin_basis): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let ang = std::f64::consts::TAU * k as f64 * i as f64 / n as f64;
            (ang.cos(), ang.sin())
        })
        .unzip();
    let cc: f64 = cos_basis.iter().map(|v| v * v).sum();
    let ss: f64 = sin_basis.iter().map(|v| v * v).sum();
    let cw: f64 = cos_basis.iter().zip(w).map(|(c, x)| c * x).sum();
    let sw: f64 = sin_basis.iter().zip(w).map(|(s, x)| s * x).sum();
    // integer frequencies make the two basis vectors orthogonal; the sine
    // basis vanishes identically at k = 0 and k = n/2
    let a = cw / cc;
    let b = if ss < 1e-9 { 0.0 } else { sw / ss };
    let mut resid_sq = 0.0;
    let mut norm_sq = 0.0;
    for i in 0..n {
        let fit = a * cos_basis[i] + b * sin_basis[i];
        resid_sq += (w[i] - fit) * (w[i] - fit);
        norm_sq += w[i] * w[i];
    }
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(SinusoidFit { k, a, b, rel_residual: (resid_sq / norm_sq).sqrt().min(1.0) })
}

/// Index of the largest-magnitude entry; ties break to the smallest index.
pub fn peak_index(w: &[f64]) -> Result<usize> {
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut best = 0;
    for (i, &v) in w.iter().enumerate() {
        if v.abs() > w[best].abs() {
            best = i;
        }
    }
    Ok(best)
}

/// Circular distance between two indices on a ring of length `n`.
pub fn circular_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j) % n;
    d.min(n - d)
}

/// Qualitative shape of a receptive field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizationVerdict {
    Localized,
    Oscillatory,
    Flat,
}

/// Default IPR cutoff separating the localized cluster from the oscillatory
/// one; configurable at the call site.
pub const DEFAULT_IPR_THRESHOLD: f64 = 0.3;

/// Classify a weight vector: localized when the IPR clears the threshold,
/// otherwise by the quality and frequency of its best sinusoid fit.
pub fn localization_verdict(w: &[f64], ipr_threshold: f64) -> Result<LocalizationVerdict> {
    if ipr(w)? >= ipr_threshold {
        return Ok(LocalizationVerdict::Localized);
    }
    let fit = sinusoid_fit(w)?;
    if fit.k >= 1 && fit.rel_residual <= 0.2 {
        Ok(LocalizationVerdict::Oscillatory)
    } else if fit.k == 0 && fit.rel_residual <= 0.2 {
        Ok(LocalizationVerdict::Flat)
    } else {
        Ok(LocalizationVerdict::Oscillatory)
    }
}
