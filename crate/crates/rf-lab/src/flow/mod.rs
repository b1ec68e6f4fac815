//! Effective weight dynamics of the single nonlinear neuron.
//!
//! Early in training, the gradient flow of the single ReLU neuron on the
//! two-class lengthscale task reduces to
//!
//! ```text
//! (2/tau) dw/dt = phi( Sigma_1 w / sqrt(<Sigma_1 w, w>) ) - (Sigma_0 + Sigma_1) w
//! ```
//!
//! with the amplifier `phi` applied elementwise (the derivation is
//! per-coordinate). The first term is invariant under positive rescaling of
//! `w` and governs its shape; the second term only constrains the scale.
//! For elliptical ensembles the amplifier collapses to a linear map and the
//! flow becomes
//!
//! ```text
//! (1/tau) dw/dt = C Sigma_1 w / sqrt(w' Sigma_1 w) - (Sigma_0 + Sigma_1) w / 2,
//! ```
//!
//! whose steady states are supported on at most two Fourier index pairs
//! whenever the per-index eigenvalue ratios of the class covariances are
//! distinct - hence sinusoidal, never localized.
//!
//! Both flows integrate with explicit Euler on the time axis
//! `t = (gradient steps) x tau`, so trajectories line up with trained ones.

pub mod marginal;
pub mod phi;

pub use marginal::{MarginalSpec, EMPIRICAL_MIN_SAMPLES};
pub use phi::{alg, alg_inv, phi, phi_taylor3, AmplifierTable, TaylorAmplifier};

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::stimulus::{task_sample, CirculantCovariance, LabeledBatch, StimulusModel};
use crate::trajectory::{TrajectoryMeta, WeightTrajectory};

/// Amplifier arguments are clamped into `[-1 + CLAMP_MARGIN, 1 - CLAMP_MARGIN]`.
const CLAMP_MARGIN: f64 = 1e-9;

/// A step aborts when more than this fraction of coordinates needed clamping.
const CLAMP_ABORT_FRACTION: f64 = 0.01;

/// Euler integration settings. `dt` is measured in gradient steps, so a
/// trained trajectory with learning rate `tau` and a flow with the same
/// `tau` share the time axis `t = step * tau`.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    /// Euler step in gradient-step units.
    pub dt: f64,
    pub steps: usize,
    /// Learning-rate timescale defining the time axis.
    pub tau: f64,
    /// Snapshots are recorded every `record_stride` Euler steps.
    pub record_stride: usize,
    /// Constant `C` of the elliptical flow; defaults to the Gaussian value
    /// `sqrt(2/pi)` and is otherwise estimated by
    /// [`elliptical_flow_constant`].
    pub c_elliptical: f64,
}

impl FlowConfig {
    /// Defaults: `tau`-normalized step `dt * tau = 1e-2`, `1e5` steps.
    pub fn with_tau(tau: f64) -> Self {
        FlowConfig {
            dt: 1e-2 / tau,
            steps: 100_000,
            tau,
            record_stride: 10_000,
            c_elliptical: (2.0 / std::f64::consts::PI).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.steps == 0 || !(self.tau > 0.0) || self.record_stride == 0 {
            return Err(Error::InvalidParameter(format!(
                "flow config must have positive dt, tau, steps and stride: {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig::with_tau(0.05)
    }
}

fn check_pair(sigma0: &CirculantCovariance, sigma1: &CirculantCovariance) -> Result<usize> {
    if sigma0.n() != sigma1.n() {
        return Err(Error::ShapeMismatch(format!(
            "class covariances differ in dimension: {} vs {}",
            sigma0.n(),
            sigma1.n()
        )));
    }
    Ok(sigma0.n())
}

/// Right-hand side of the early-time flow, `phi_vec(arg) - (Sigma_0 + Sigma_1) w`
/// (the `(2/tau) dw/dt` normalization). Returns the RHS together with the
/// number of clamped amplifier arguments.
pub fn eq5_rhs(
    sigma0: &CirculantCovariance,
    sigma1: &CirculantCovariance,
    amplifier: &dyn Fn(f64) -> f64,
    w: &[f64],
) -> Result<(Vec<f64>, usize)> {
    let n = check_pair(sigma0, sigma1)?;
    if w.len() != n {
        return Err(Error::ShapeMismatch(format!("weight length {} vs dimension {n}", w.len())));
    }
    let s1w = sigma1.matvec(w);
    let norm_sq: f64 = s1w.iter().zip(w).map(|(a, b)| a * b).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroVector);
    }
    let norm = norm_sq.sqrt();
    let s0w = sigma0.matvec(w);
    let mut clamped = 0;
    let rhs: Vec<f64> = (0..n)
        .map(|i| {
            let mut a = s1w[i] / norm;
            if a.abs() > 1.0 - CLAMP_MARGIN {
                a = a.clamp(-(1.0 - CLAMP_MARGIN), 1.0 - CLAMP_MARGIN);
                clamped += 1;
            }
            amplifier(a) - (s0w[i] + s1w[i])
        })
        .collect();
    Ok((rhs, clamped))
}

fn integrate<F>(w0: &[f64], cfg: &FlowConfig, provenance: String, mut rhs: F) -> Result<WeightTrajectory>
where
    F: FnMut(&[f64], usize) -> Result<(Vec<f64>, usize)>,
{
    cfg.validate()?;
    if w0.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let n = w0.len();
    let mut w = w0.to_vec();
    let mut traj = WeightTrajectory::new(TrajectoryMeta {
        tau: cfg.tau,
        steps: cfg.steps,
        provenance,
        clamp_events: 0,
    });
    let snapshot = |w: &[f64]| Array2::from_shape_vec((1, n), w.to_vec()).expect("shape");
    traj.push(0.0, snapshot(&w));
    for step in 0..cfg.steps {
        let (rhs_vec, clamped) = rhs(&w, step)?;
        if clamped > 0 {
            traj.meta.clamp_events += clamped;
            if clamped as f64 > CLAMP_ABORT_FRACTION * n as f64 {
                return Err(Error::FlowDomainBreach { step, clamped, n });
            }
        }
        for (wi, ri) in w.iter_mut().zip(&rhs_vec) {
            *wi += cfg.dt * cfg.tau * ri;
        }
        if (step + 1) % cfg.record_stride == 0 || step + 1 == cfg.steps {
            traj.push((step + 1) as f64 * cfg.dt * cfg.tau, snapshot(&w));
        }
    }
    Ok(traj)
}

/// Integrate the early-time flow with explicit Euler from `w0`.
///
/// The per-step update is `dw = dt * tau * rhs / 2`, matching a gradient
/// step of size `tau` at `dt = 1`. Amplifier arguments are clamped just
/// inside (-1, 1); a step where more than 1% of coordinates clamp aborts
/// with a domain-breach diagnostic.
pub fn integrate_flow(
    sigma0: &CirculantCovariance,
    sigma1: &CirculantCovariance,
    amplifier: &dyn Fn(f64) -> f64,
    w0: &[f64],
    cfg: &FlowConfig,
) -> Result<WeightTrajectory> {
    check_pair(sigma0, sigma1)?;
    integrate(w0, cfg, "amplifier-flow".to_string(), |w, _| {
        let (mut rhs, clamped) = eq5_rhs(sigma0, sigma1, amplifier, w)?;
        for r in rhs.iter_mut() {
            *r *= 0.5;
        }
        Ok((rhs, clamped))
    })
}

/// Integrate the elliptical flow
/// `(1/tau) dw/dt = C Sigma_1 w / sqrt(w' Sigma_1 w) - (Sigma_0 + Sigma_1) w / 2`.
///
/// `C` only sets the steady-state scale (for `Sigma_0 = Sigma_1 = I` the
/// radial fixed point is `||w|| = C`); the steady-state shape is dictated by
/// the covariance spectra.
pub fn integrate_elliptical_flow(
    sigma0: &CirculantCovariance,
    sigma1: &CirculantCovariance,
    c: f64,
    w0: &[f64],
    cfg: &FlowConfig,
) -> Result<WeightTrajectory> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("elliptical constant must be positive, got {c}")));
    }
    let n = check_pair(sigma0, sigma1)?;
    if w0.len() != n {
        return Err(Error::ShapeMismatch(format!("weight length {} vs dimension {n}", w0.len())));
    }
    integrate(w0, cfg, format!("elliptical-flow(C={c})"), |w, _| {
        let s1w = sigma1.matvec(w);
        let norm_sq: f64 = s1w.iter().zip(w).map(|(a, b)| a * b).sum();
        if !(norm_sq > 0.0) {
            return Err(Error::ZeroVector);
        }
        let norm = norm_sq.sqrt();
        let s0w = sigma0.matvec(w);
        let rhs: Vec<f64> = (0..w.len())
            .map(|i| c * s1w[i] / norm - 0.5 * (s0w[i] + s1w[i]))
            .collect();
        Ok((rhs, 0))
    })
}

/// Monte-Carlo estimate of the exact K-class flow right-hand side
/// `2 E[Y 1(<w, X> >= 0) X] - (1/K) sum_y Sigma_y w`,
/// with the analytic per-class covariances in the second term. This is the
/// `(1/tau) dw/dt` normalization: half of [`eq5_rhs`] for two classes.
pub fn empirical_flow_rhs<R: Rng + ?Sized>(
    model: &StimulusModel,
    w: &[f64],
    mc_batch: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    assert!(mc_batch >= 1_000, "Monte-Carlo batch must have at least 1e3 samples");
    let covariances: Vec<CirculantCovariance> = (0..model.num_classes())
        .map(|y| model.class_covariance(y))
        .collect::<Result<_>>()?;
    let batch = task_sample(model, mc_batch, rng)?;
    flow_rhs_from_batch(&batch, &covariances, w)
}

/// The same estimator on an explicit labelled batch (exposed for oracles).
pub fn flow_rhs_from_batch(
    batch: &LabeledBatch,
    covariances: &[CirculantCovariance],
    w: &[f64],
) -> Result<Vec<f64>> {
    let n = batch.n();
    if w.len() != n {
        return Err(Error::ShapeMismatch(format!("weight length {} vs dimension {n}", w.len())));
    }
    if batch.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let k = covariances.len() as f64;
    let mut first = vec![0.0; n];
    let wv = Array1::from_vec(w.to_vec());
    let pre = batch.inputs.dot(&wv);
    for (row, (&label, &p)) in batch.inputs.rows().into_iter().zip(batch.labels.iter().zip(&pre)) {
        if p >= 0.0 && label > 0 {
            let y = label as f64;
            for (f, &x) in first.iter_mut().zip(row.iter()) {
                *f += y * x;
            }
        }
    }
    let scale = 2.0 / batch.len() as f64;
    let mut rhs: Vec<f64> = first.iter().map(|f| f * scale).collect();
    for cov in covariances {
        let sw = cov.matvec(w);
        for (r, s) in rhs.iter_mut().zip(&sw) {
            *r -= s / k;
        }
    }
    Ok(rhs)
}

/// Largest number of Fourier indices sharing an eigenvalue ratio
/// `lambda_i(Sigma_0) / lambda_i(Sigma_1)`, bucketed at relative tolerance
/// `1e-9`. The elliptical steady state can only be supported where a shared
/// ratio exists, so a return value of 2 (one conjugate pair) certifies the
/// sinusoid conclusion.
pub fn eigen_ratio_multiplicity(
    sigma0: &CirculantCovariance,
    sigma1: &CirculantCovariance,
) -> Result<usize> {
    check_pair(sigma0, sigma1)?;
    let e0 = sigma0.eigenvalues()?;
    let e1 = sigma1.eigenvalues()?;
    if let Some(idx) = e1.iter().position(|&l| l <= 0.0) {
        return Err(Error::DegenerateSpectrum { index: idx });
    }
    let mut ratios: Vec<f64> = e0.iter().zip(&e1).map(|(a, b)| a / b).collect();
    ratios.sort_by(f64::total_cmp);
    let mut best = 1;
    let mut run = 1;
    for i in 1..ratios.len() {
        let (a, b) = (ratios[i - 1], ratios[i]);
        if (b - a).abs() <= 1e-9 * a.abs().max(b.abs()) {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
        }
    }
    Ok(best)
}

/// Monte-Carlo estimate of the elliptical constant `C = E[|<w, X>|] / sqrt(w' Sigma w)`
/// for a class generator (the ratio is independent of the probe direction
/// by ellipticity). For Gaussian data this is `sqrt(2/pi)`.
pub fn elliptical_flow_constant<R: Rng + ?Sized>(
    model: &StimulusModel,
    label: usize,
    mc_batch: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = model.n();
    let cov = model.class_covariance(label)?;
    let probe: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    let x = model.sample_class(label, mc_batch, rng)?;
    let mut acc = 0.0;
    for row in x.rows() {
        let s: f64 = row.iter().zip(&probe).map(|(a, b)| a * b).sum();
        acc += s.abs();
    }
    let sw = cov.matvec(&probe);
    let denom: f64 = sw.iter().zip(&probe).map(|(a, b)| a * b).sum::<f64>();
    Ok(acc / mc_batch as f64 / denom.sqrt())
}
