//! Symmetric one-dimensional marginal laws feeding the amplifier.
//!
//! The effective dynamics depend on the data distribution only through the
//! marginal law of a single coordinate (conditioned on the long-lengthscale
//! class), so a handful of closed-form families plus an empirical fallback
//! cover every generator in the crate.

use crate::error::{Error, Result};
use crate::stimulus::kur::{kur_marginal_fourth_moment, kur_marginal_variance, kur_norm_constant};
use crate::stimulus::StimulusModel;

/// Minimum sample count accepted for the empirical kind.
pub const EMPIRICAL_MIN_SAMPLES: usize = 10_000;

/// A symmetric (about zero) marginal law with moment queries.
///
/// Odd moments vanish by construction: the empirical kind stores absolute
/// values and is interpreted as the symmetrized law of its inputs.
#[derive(Debug, Clone)]
pub enum MarginalSpec {
    /// Equal mass on -v and +v.
    TwoPoint { v: f64 },
    /// Centered Gaussian with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// The `alg_k` law scaled by `scale` (the normalized Kur marginal has
    /// `scale = 1/Z`).
    AlgSigmoid { k: f64, scale: f64 },
    /// Symmetrized empirical law; `abs_samples` holds magnitudes.
    Empirical { abs_samples: Vec<f64> },
}

impl MarginalSpec {
    pub fn two_point(v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("two-point mass must sit at v > 0, got {v}")));
        }
        Ok(MarginalSpec::TwoPoint { v })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(MarginalSpec::Gaussian { sigma })
    }

    /// `k <= 2` is rejected: the law would have no second moment, so the
    /// amplifier expectation itself would diverge.
    pub fn alg_sigmoid(k: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if k <= 2.0 {
            return Err(Error::DivergentMoment { what: "variance", k });
        }
        Ok(MarginalSpec::AlgSigmoid { k, scale })
    }

    /// Symmetrize a sample set into an empirical marginal.
    pub fn empirical(samples: &[f64]) -> Result<Self> {
        if samples.len() < EMPIRICAL_MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "empirical marginal needs at least {EMPIRICAL_MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("empirical samples must be finite".into()));
        }
        Ok(MarginalSpec::Empirical { abs_samples: samples.iter().map(|v| v.abs()).collect() })
    }

    /// Closed-form marginal of one class of a stimulus model, where one
    /// exists: two-point for Ising spins, the scaled `alg_k` law for Kur
    /// outside the heavy-tailed regime. NLGP and elliptical marginals (and
    /// heavy-tailed Kur) have no closed-form kind here; sample them into
    /// [`MarginalSpec::empirical`] instead.
    pub fn for_model(model: &StimulusModel, _label: usize) -> Option<MarginalSpec> {
        match model {
            StimulusModel::Ising { .. } => Some(MarginalSpec::TwoPoint { v: 1.0 }),
            StimulusModel::Kur { tail, .. } => {
                kur_norm_constant(*tail).map(|z| MarginalSpec::AlgSigmoid { k: *tail, scale: 1.0 / z })
            }
            _ => None,
        }
    }

    /// Second moment (always finite by construction).
    pub fn m2(&self) -> f64 {
        match self {
            MarginalSpec::TwoPoint { v } => v * v,
            MarginalSpec::Gaussian { sigma } => sigma * sigma,
            MarginalSpec::AlgSigmoid { k, scale } => {
                scale * scale * kur_marginal_variance(*k).expect("k > 2 enforced at construction")
            }
            MarginalSpec::Empirical { abs_samples } => {
                abs_samples.iter().map(|v| v * v).sum::<f64>() / abs_samples.len() as f64
            }
        }
    }

    /// Fourth moment; diverges for the `alg_k` kind with `k <= 4`.
    pub fn m4(&self) -> Result<f64> {
        match self {
            MarginalSpec::TwoPoint { v } => Ok(v.powi(4)),
            MarginalSpec::Gaussian { sigma } => Ok(3.0 * sigma.powi(4)),
            MarginalSpec::AlgSigmoid { k, scale } => {
                Ok(scale.powi(4) * kur_marginal_fourth_moment(*k)?)
            }
            MarginalSpec::Empirical { abs_samples } => {
                Ok(abs_samples.iter().map(|v| v.powi(4)).sum::<f64>() / abs_samples.len() as f64)
            }
        }
    }

    /// Excess kurtosis `m4 / m2^2 - 3` where defined.
    pub fn excess_kurtosis(&self) -> Result<f64> {
        let m2 = self.m2();
        Ok(self.m4()? / (m2 * m2) - 3.0)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MarginalSpec::TwoPoint { .. } => "two-point",
            MarginalSpec::Gaussian { .. } => "gaussian",
            MarginalSpec::AlgSigmoid { .. } => "alg-sigmoid",
            MarginalSpec::Empirical { .. } => "empirical",
        }
    }
}
