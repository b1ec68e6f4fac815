//! Stimulus synthesis for the lengthscale discrimination task.
//!
//! Four generator families share the same contract: sign-symmetric,
//! translation-invariant vectors whose class label selects the correlation
//! lengthscale. Labels are drawn uniformly; inputs come from the labelled
//! class's generator; everything is a pure function of (config, seed).

pub mod covariance;
pub mod elliptical;
pub mod ising;
pub mod kur;
pub mod nlgp;

pub use covariance::{sqexp_covariance, CirculantCovariance, Layout};
pub use elliptical::{custom_radial_cdf, custom_radial_inverse_cdf, elliptical_sample, RadialLaw};
pub use ising::{ising_batch, ising_covariance, ising_pair_correlation_exact, ising_sample, IsingChain};
pub use kur::{
    alg_k_cdf, alg_k_cdf_inverse, kur_covariance, kur_excess_kurtosis_quadrature,
    kur_marginal_fourth_moment, kur_marginal_variance, kur_norm_constant, kur_sample,
    kur_sample_raw, KurBatch, HEAVY_TAIL_K,
};
pub use nlgp::{erf_sq_expectation, gaussian_batch, nlgp_covariance, nlgp_norm_constant, nlgp_sample};

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};

/// A labelled batch: `batch x n` inputs and `{0, 1, ...}` class labels.
#[derive(Debug, Clone)]
pub struct LabeledBatch {
    pub inputs: Array2<f64>,
    pub labels: Vec<u8>,
}

impl LabeledBatch {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n(&self) -> usize {
        self.inputs.ncols()
    }
}

/// Tagged generator configuration producing labelled batches.
///
/// Class parameters are indexed by label; class 1 always has a strictly
/// longer correlation lengthscale than class 0.
#[derive(Debug, Clone)]
pub enum StimulusModel {
    /// Periodic Ising chains with per-class ferromagnetic couplings.
    Ising {
        n: usize,
        couplings: Vec<f64>,
        burn_in_sweeps: usize,
        thin_sweeps: usize,
    },
    /// `erf(g Z) / Z(g)` of latent Gaussians with per-class covariances.
    Nlgp { gain: f64, covariances: Vec<CirculantCovariance> },
    /// Gaussian-copula `alg_k` marginals with per-class latent covariances.
    Kur { tail: f64, covariances: Vec<CirculantCovariance> },
    /// `R * Lambda_y * U` with per-class radial laws and covariances.
    Elliptical { radial_laws: Vec<RadialLaw>, covariances: Vec<CirculantCovariance> },
}

fn check_increasing(name: &str, values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two classes, got {}",
            values.len()
        )));
    }
    for w in values.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be strictly increasing across classes, got {values:?}"
            )));
        }
    }
    Ok(())
}

fn sqexp_family(n: usize, lengthscales: &[f64]) -> Result<Vec<CirculantCovariance>> {
    check_increasing("lengthscale", lengthscales)?;
    lengthscales.iter().map(|&xi| sqexp_covariance(n, xi, true)).collect()
}

impl StimulusModel {
    /// Ising task with default burn-in and thinning.
    pub fn ising(n: usize, couplings: &[f64]) -> Result<Self> {
        check_increasing("coupling", couplings)?;
        Ok(StimulusModel::Ising {
            n,
            couplings: couplings.to_vec(),
            burn_in_sweeps: ising::default_burn_in_sweeps(n),
            thin_sweeps: ising::default_thin_sweeps(n),
        })
    }

    /// NLGP task over circular squared-exponential latents.
    pub fn nlgp(n: usize, gain: f64, lengthscales: &[f64]) -> Result<Self> {
        if !(gain > 0.0) {
            return Err(Error::InvalidParameter(format!("gain must be positive, got {gain}")));
        }
        Ok(StimulusModel::Nlgp { gain, covariances: sqexp_family(n, lengthscales)? })
    }

    /// Kur task over circular squared-exponential latents.
    pub fn kur(n: usize, tail: f64, lengthscales: &[f64]) -> Result<Self> {
        if !(tail > 0.0) {
            return Err(Error::InvalidParameter(format!("tail index must be positive, got {tail}")));
        }
        Ok(StimulusModel::Kur { tail, covariances: sqexp_family(n, lengthscales)? })
    }

    /// Elliptical task; lengthscale ordering is checked on the lag-1
    /// correlations of the class covariances.
    pub fn elliptical(
        radial_laws: Vec<RadialLaw>,
        covariances: Vec<CirculantCovariance>,
    ) -> Result<Self> {
        if radial_laws.len() != covariances.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} radial laws vs {} covariances",
                radial_laws.len(),
                covariances.len()
            )));
        }
        for law in &radial_laws {
            law.validate()?;
        }
        let lag1: Vec<f64> = covariances.iter().map(|c| c.correlation(1)).collect();
        check_increasing("lag-1 correlation", &lag1)?;
        let n = covariances[0].n();
        if covariances.iter().any(|c| c.n() != n) {
            return Err(Error::ShapeMismatch("class covariances differ in dimension".into()));
        }
        Ok(StimulusModel::Elliptical { radial_laws, covariances })
    }

    pub fn n(&self) -> usize {
        match self {
            StimulusModel::Ising { n, .. } => *n,
            StimulusModel::Nlgp { covariances, .. }
            | StimulusModel::Kur { covariances, .. }
            | StimulusModel::Elliptical { covariances, .. } => covariances[0].n(),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            StimulusModel::Ising { couplings, .. } => couplings.len(),
            StimulusModel::Nlgp { covariances, .. }
            | StimulusModel::Kur { covariances, .. }
            | StimulusModel::Elliptical { covariances, .. } => covariances.len(),
        }
    }

    /// Draw a batch from one class's generator.
    pub fn sample_class<R: Rng + ?Sized>(
        &self,
        label: usize,
        batch: usize,
        rng: &mut R,
    ) -> Result<Array2<f64>> {
        if label >= self.num_classes() {
            return Err(Error::InvalidParameter(format!(
                "label {label} out of range for {} classes",
                self.num_classes()
            )));
        }
        match self {
            StimulusModel::Ising { n, couplings, burn_in_sweeps, thin_sweeps } => Ok(ising_batch(
                *n,
                couplings[label],
                *burn_in_sweeps,
                *thin_sweeps,
                batch,
                rng,
            )),
            StimulusModel::Nlgp { gain, covariances } => {
                nlgp_sample(*gain, &covariances[label], batch, rng)
            }
            StimulusModel::Kur { tail, covariances } => {
                Ok(kur_sample(*tail, &covariances[label], batch, rng)?.data)
            }
            StimulusModel::Elliptical { radial_laws, covariances } => {
                elliptical_sample(radial_laws[label], &covariances[label], batch, rng)
            }
        }
    }

    /// Analytic covariance of the class's observed coordinates.
    ///
    /// For the elliptical family this is the covariance parameter
    /// `Sigma_y` itself (the flow is stated in terms of it); the true
    /// sample covariance is `E[R^2]/N * Sigma_y`.
    pub fn class_covariance(&self, label: usize) -> Result<CirculantCovariance> {
        if label >= self.num_classes() {
            return Err(Error::InvalidParameter(format!(
                "label {label} out of range for {} classes",
                self.num_classes()
            )));
        }
        match self {
            StimulusModel::Ising { n, couplings, .. } => Ok(ising_covariance(*n, couplings[label])),
            StimulusModel::Nlgp { gain, covariances } => nlgp_covariance(*gain, &covariances[label]),
            StimulusModel::Kur { tail, covariances } => kur_covariance(*tail, &covariances[label]),
            StimulusModel::Elliptical { covariances, .. } => Ok(covariances[label].clone()),
        }
    }

    /// Short human-readable tag used in report rows.
    pub fn tag(&self) -> String {
        match self {
            StimulusModel::Ising { couplings, .. } => format!("ising{couplings:?}"),
            StimulusModel::Nlgp { gain, .. } => format!("nlgp(g={gain})"),
            StimulusModel::Kur { tail, .. } => format!("kur(k={tail})"),
            StimulusModel::Elliptical { radial_laws, .. } => format!("elliptical{radial_laws:?}"),
        }
    }
}

/// Draw a labelled batch: labels uniform over classes, inputs from the
/// per-class generators, deterministic given the stream.
pub fn task_sample<R: Rng + ?Sized>(
    model: &StimulusModel,
    batch: usize,
    rng: &mut R,
) -> Result<LabeledBatch> {
    let classes = model.num_classes();
    let n = model.n();
    let labels: Vec<u8> = (0..batch).map(|_| rng.gen_range(0..classes) as u8).collect();
    let mut inputs = Array2::zeros((batch, n));
    for class in 0..classes {
        let rows: Vec<usize> = (0..batch).filter(|&i| labels[i] as usize == class).collect();
        if rows.is_empty() {
            continue;
        }
        let block = model.sample_class(class, rows.len(), rng)?;
        for (src, &dst) in rows.iter().enumerate() {
            inputs.row_mut(dst).assign(&block.row(src));
        }
    }
    Ok(LabeledBatch { inputs, labels })
}
