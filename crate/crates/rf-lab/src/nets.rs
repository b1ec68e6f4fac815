//! Two-layer feedforward architectures and batch gradient descent on the
//! lengthscale discrimination task.
//!
//! The full architecture is `y(x) = b2 + sum_m w2_m sigma(b1_m + <w1_m, x>)`.
//! Three presets cover the experiments: the bias-free single ReLU neuron
//! (only `w1` learns), the soft committee machine with second-layer weights
//! frozen at `1/M`, and the fully trainable two-layer network. Training
//! draws a fresh batch every step (online full-batch descent, matching the
//! infinite-data flow theory) and records first-layer snapshots.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::root;
use crate::stimulus::{task_sample, LabeledBatch, StimulusModel};
use crate::trajectory::{TrajectoryMeta, WeightTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Subgradient; 0 at the ReLU kink (a measure-zero event).
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-x).exp());
                s * (1.0 - s)
            }
        }
    }
}

/// Which parameter groups receive gradient updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainableMask {
    pub w1: bool,
    pub b1: bool,
    pub w2: bool,
    pub b2: bool,
}

/// Architecture presets used across the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArchPreset {
    /// One ReLU unit, no biases, unit output weight; only `w1` learns.
    SingleNeuron,
    /// Soft committee machine: `w2` frozen at `1/hidden`, biases frozen at
    /// zero, so each unit follows single-neuron-like dynamics at `1/hidden`
    /// of the rate.
    ///
    /// Note the activation matters here: with zero biases a *sigmoid*
    /// committee on sign-symmetric stimuli has no discriminative gradient at
    /// all (`sigma'` is even, so `E[sigma'(<w,X>) X]` vanishes identically)
    /// and the first layer never forms structure; the ReLU committee keeps
    /// the kink that drives localization.
    Scm { hidden: usize, activation: Activation },
    /// Everything learns.
    TwoLayer { hidden: usize, activation: Activation },
}

impl ArchPreset {
    pub fn hidden_units(&self) -> usize {
        match self {
            ArchPreset::SingleNeuron => 1,
            ArchPreset::Scm { hidden, .. } | ArchPreset::TwoLayer { hidden, .. } => *hidden,
        }
    }

    pub fn activation(&self) -> Activation {
        match self {
            ArchPreset::SingleNeuron => Activation::Relu,
            ArchPreset::Scm { activation, .. } | ArchPreset::TwoLayer { activation, .. } => {
                *activation
            }
        }
    }

    pub fn mask(&self) -> TrainableMask {
        match self {
            ArchPreset::SingleNeuron => {
                TrainableMask { w1: true, b1: false, w2: false, b2: false }
            }
            ArchPreset::Scm { .. } => {
                TrainableMask { w1: true, b1: false, w2: false, b2: false }
            }
            ArchPreset::TwoLayer { .. } => {
                TrainableMask { w1: true, b1: true, w2: true, b2: true }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            ArchPreset::SingleNeuron => "single-neuron".into(),
            ArchPreset::Scm { hidden, .. } => format!("scm-{hidden}"),
            ArchPreset::TwoLayer { hidden, .. } => format!("two-layer-{hidden}"),
        }
    }
}

/// Weights and biases of the two-layer network.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerParams {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array1<f64>,
    pub b2: f64,
    pub activation: Activation,
    pub mask: TrainableMask,
}

/// Gradients matching [`TwoLayerParams`]; frozen groups stay zero.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array1<f64>,
    pub b2: f64,
}

/// Training settings for batch gradient descent.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Learning rate.
    pub tau: f64,
    pub steps: usize,
    /// Fresh samples drawn per step.
    pub batch_size: usize,
    pub init_variance: f64,
    pub seed: u64,
    /// First-layer snapshots are recorded every this many steps.
    pub snapshot_stride: usize,
}

impl TrainConfig {
    /// Defaults for the single-neuron experiments.
    pub fn single_neuron(seed: u64) -> Self {
        TrainConfig {
            tau: 0.05,
            steps: 10_000,
            batch_size: 1_000,
            init_variance: 0.1,
            seed,
            snapshot_stride: 100,
        }
    }

    /// Defaults for the multi-neuron experiments.
    pub fn multi_neuron(seed: u64) -> Self {
        TrainConfig { tau: 0.01, ..TrainConfig::single_neuron(seed) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0)
            || self.steps == 0
            || self.batch_size == 0
            || self.snapshot_stride == 0
        {
            return Err(Error::InvalidParameter(format!("bad train config: {self:?}")));
        }
        if !(self.init_variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "init variance must be positive, got {}",
                self.init_variance
            )));
        }
        Ok(())
    }
}

/// Draw initial parameters: trainable tensors i.i.d. `N(0, init_variance)`,
/// frozen ones at their preset values.
pub fn init_params<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    init_variance: f64,
    preset: ArchPreset,
    rng: &mut R,
) -> Result<TwoLayerParams> {
    if m != preset.hidden_units() {
        return Err(Error::ShapeMismatch(format!(
            "preset {} expects {} hidden units, got {m}",
            preset.name(),
            preset.hidden_units()
        )));
    }
    if m < 1 || n < 2 {
        return Err(Error::InvalidParameter(format!("need M >= 1 and N >= 2, got M={m}, N={n}")));
    }
    if !(init_variance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "init variance must be positive, got {init_variance}"
        )));
    }
    let sd = init_variance.sqrt();
    let mask = preset.mask();
    let w1 = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal) * sd);
    let b1 = if mask.b1 {
        Array1::from_shape_fn(m, |_| rng.sample::<f64, _>(StandardNormal) * sd)
    } else {
        Array1::zeros(m)
    };
    let w2 = match preset {
        ArchPreset::SingleNeuron => Array1::ones(1),
        ArchPreset::Scm { hidden, .. } => Array1::from_elem(hidden, 1.0 / hidden as f64),
        ArchPreset::TwoLayer { hidden, .. } => {
            Array1::from_shape_fn(hidden, |_| rng.sample::<f64, _>(StandardNormal) * sd)
        }
    };
    let b2 = if mask.b2 { rng.sample::<f64, _>(StandardNormal) * sd } else { 0.0 };
    Ok(TwoLayerParams { w1, b1, w2, b2, activation: preset.activation(), mask })
}

/// Scalar output for one input vector.
pub fn forward(params: &TwoLayerParams, x: &[f64]) -> f64 {
    assert_eq!(x.len(), params.w1.ncols(), "input dimension mismatch");
    let mut out = params.b2;
    for m in 0..params.w1.nrows() {
        let z = params.b1[m] + params.w1.row(m).iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        out += params.w2[m] * params.activation.eval(z);
    }
    out
}

/// Mean-squared error and exact (sub)gradients over a batch.
///
/// Gradients for frozen groups are zero so a masked descent step can apply
/// them blindly.
pub fn mse_and_grad(params: &TwoLayerParams, batch: &LabeledBatch) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    if batch.n() != params.w1.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "batch dimension {} vs network input {}",
            batch.n(),
            params.w1.ncols()
        )));
    }
    let b = batch.len();
    let act = params.activation;
    let mut z = batch.inputs.dot(&params.w1.t());
    z += &params.b1;
    let a = z.mapv(|v| act.eval(v));
    let yhat = a.dot(&params.w2) + params.b2;

    let mut loss = 0.0;
    let mut delta = Array1::zeros(b);
    for (i, (&label, &pred)) in batch.labels.iter().zip(yhat.iter()).enumerate() {
        let e = pred - label as f64;
        loss += e * e;
        delta[i] = 2.0 * e / b as f64;
    }
    loss /= b as f64;

    let mask = params.mask;
    let gw2 = if mask.w2 { a.t().dot(&delta) } else { Array1::zeros(params.w2.len()) };
    let gb2 = if mask.b2 { delta.sum() } else { 0.0 };
    let (gw1, gb1) = if mask.w1 || mask.b1 {
        // back through the hidden layer: d_im = delta_i * w2_m * act'(z_im)
        let mut d = z.mapv(|v| act.derivative(v));
        for (mut row, &dl) in d.rows_mut().into_iter().zip(delta.iter()) {
            for (m, v) in row.iter_mut().enumerate() {
                *v *= dl * params.w2[m];
            }
        }
        let gw1 =
            if mask.w1 { d.t().dot(&batch.inputs) } else { Array2::zeros(params.w1.dim()) };
        let gb1 =
            if mask.b1 { d.sum_axis(ndarray::Axis(0)) } else { Array1::zeros(params.b1.len()) };
        (gw1, gb1)
    } else {
        (Array2::zeros(params.w1.dim()), Array1::zeros(params.b1.len()))
    };
    Ok((loss, Gradients { w1: gw1, b1: gb1, w2: gw2, b2: gb2 }))
}

/// Apply one masked descent step `theta <- theta - tau * grad`.
pub fn apply_gradients(params: &mut TwoLayerParams, grads: &Gradients, tau: f64) {
    if params.mask.w1 {
        params.w1.scaled_add(-tau, &grads.w1);
    }
    if params.mask.b1 {
        params.b1.scaled_add(-tau, &grads.b1);
    }
    if params.mask.w2 {
        params.w2.scaled_add(-tau, &grads.w2);
    }
    if params.mask.b2 {
        params.b2 -= tau * grads.b2;
    }
}

/// A finished training run: the recorded trajectory, the per-step loss
/// trace, and the final parameters.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub trajectory: WeightTrajectory,
    pub losses: Vec<f64>,
    pub params: TwoLayerParams,
}

/// Batch gradient descent with a fresh task batch every step.
///
/// Deterministic per seed; snapshots of the first layer are recorded at
/// `snapshot_stride` intervals on the time axis `t = step * tau`. A
/// non-finite loss aborts with the first layer attached as a diagnostic.
pub fn train(model: &StimulusModel, preset: ArchPreset, cfg: &TrainConfig) -> Result<TrainRun> {
    cfg.validate()?;
    let mut rng = root(cfg.seed);
    let mut params =
        init_params(preset.hidden_units(), model.n(), cfg.init_variance, preset, &mut rng)?;
    let mut traj = WeightTrajectory::new(TrajectoryMeta {
        tau: cfg.tau,
        steps: cfg.steps,
        provenance: format!("train[{} on {} seed={}]", preset.name(), model.tag(), cfg.seed),
        clamp_events: 0,
    });
    // tau = 0 still needs a strictly increasing axis; fall back to steps
    let dt = if cfg.tau > 0.0 { cfg.tau } else { 1.0 };
    traj.push(0.0, params.w1.clone());
    let mut losses = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let batch = task_sample(model, cfg.batch_size, &mut rng)?;
        let (loss, grads) = mse_and_grad(&params, &batch)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                step,
                loss,
                snapshot: Box::new(params.w1.clone()),
            });
        }
        losses.push(loss);
        apply_gradients(&mut params, &grads, cfg.tau);
        if (step + 1) % cfg.snapshot_stride == 0 || step + 1 == cfg.steps {
            traj.push((step + 1) as f64 * dt, params.w1.clone());
        }
    }
    Ok(TrainRun { trajectory: traj, losses, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn toy_batch() -> LabeledBatch {
        let inputs =
            array![[1.0, -0.5, 0.3], [0.2, 0.9, -1.1], [-0.7, 0.4, 0.6], [0.5, 0.5, 0.5]];
        LabeledBatch { inputs, labels: vec![0, 1, 1, 0] }
    }

    #[test]
    fn single_neuron_forward_rules() {
        let params = TwoLayerParams {
            w1: array![[1.0, 0.0, 0.0]],
            b1: array![0.0],
            w2: array![1.0],
            b2: 0.0,
            activation: Activation::Relu,
            mask: ArchPreset::SingleNeuron.mask(),
        };
        assert_eq!(forward(&params, &[2.0, 5.0, -1.0]), 2.0);
        assert_eq!(forward(&params, &[-3.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn identical_scm_rows_average_to_one_unit() {
        let hidden = 4;
        let w_row = [0.3, -0.2, 0.8];
        let params = TwoLayerParams {
            w1: Array2::from_shape_fn((hidden, 3), |(_, j)| w_row[j]),
            b1: Array1::zeros(hidden),
            w2: Array1::from_elem(hidden, 1.0 / hidden as f64),
            b2: 0.0,
            activation: Activation::Sigmoid,
            mask: ArchPreset::Scm { hidden, activation: Activation::Sigmoid }.mask(),
        };
        let x = [1.0, 2.0, -0.5];
        let z: f64 = w_row.iter().zip(&x).map(|(w, v)| w * v).sum();
        assert_abs_diff_eq!(forward(&params, &x), Activation::Sigmoid.eval(z), epsilon = 1e-12);
    }

    #[test]
    fn presets_freeze_the_right_groups() {
        let mut rng = crate::rng::root(1);
        let single = init_params(1, 8, 0.1, ArchPreset::SingleNeuron, &mut rng).unwrap();
        assert_eq!(single.w2, array![1.0]);
        assert_eq!(single.b1, array![0.0]);
        assert_eq!(single.b2, 0.0);

        let scm = init_params(
            10,
            8,
            0.1,
            ArchPreset::Scm { hidden: 10, activation: Activation::Sigmoid },
            &mut rng,
        )
        .unwrap();
        for &v in scm.w2.iter() {
            assert_eq!(v, 0.1);
        }
        assert!(scm.b1.iter().all(|&v| v == 0.0));
        assert_eq!(scm.b2, 0.0);
    }

    #[test]
    fn init_variance_concentrates() {
        let mut rng = crate::rng::root(7);
        let var = 0.1;
        // pooled draws: chi-squared concentration puts the sample second
        // moment within 2% at 1e5 draws
        let mut pool = Vec::new();
        for _ in 0..125 {
            let p = init_params(
                10,
                80,
                var,
                ArchPreset::Scm { hidden: 10, activation: Activation::Relu },
                &mut rng,
            )
            .unwrap();
            pool.extend(p.w1.iter().copied());
        }
        let est = pool.iter().map(|v| v * v).sum::<f64>() / pool.len() as f64;
        assert!((est / var - 1.0).abs() < 0.02, "sample variance {est} vs {var}");
    }

    #[test]
    fn perfect_predictor_has_zero_loss_and_gradient() {
        // y = ReLU(x_0) with labels equal to the output
        let params = TwoLayerParams {
            w1: array![[1.0, 0.0]],
            b1: array![0.0],
            w2: array![1.0],
            b2: 0.0,
            activation: Activation::Relu,
            mask: TrainableMask { w1: true, b1: false, w2: false, b2: false },
        };
        let inputs = array![[1.0, 0.3], [0.0, -2.0], [1.0, 1.5]];
        let batch = LabeledBatch { inputs, labels: vec![1, 0, 1] };
        let (loss, grads) = mse_and_grad(&params, &batch).unwrap();
        assert_abs_diff_eq!(loss, 0.0);
        assert!(grads.w1.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn constant_zero_predictor_on_balanced_labels_has_loss_half() {
        let params = TwoLayerParams {
            w1: array![[0.0, 0.0]],
            b1: array![0.0],
            w2: array![1.0],
            b2: 0.0,
            activation: Activation::Relu,
            mask: ArchPreset::SingleNeuron.mask(),
        };
        let inputs = Array2::zeros((4, 2));
        let batch = LabeledBatch { inputs, labels: vec![0, 1, 0, 1] };
        let (loss, _) = mse_and_grad(&params, &batch).unwrap();
        assert_abs_diff_eq!(loss, 0.5);
    }

    /// Central finite differences over every trainable scalar.
    fn finite_difference_check(params: &TwoLayerParams, batch: &LabeledBatch, tol: f64) {
        let (_, grads) = mse_and_grad(params, batch).unwrap();
        let h = 1e-5;
        let loss_of = |p: &TwoLayerParams| mse_and_grad(p, batch).unwrap().0;
        let check =
            |analytic: f64, plus: TwoLayerParams, minus: TwoLayerParams, what: String| {
                let fd = (loss_of(&plus) - loss_of(&minus)) / (2.0 * h);
                let scale = analytic.abs().max(fd.abs()).max(1e-6);
                assert!(
                    (analytic - fd).abs() / scale <= tol,
                    "{what}: analytic {analytic} vs fd {fd}"
                );
            };
        for m in 0..params.w1.nrows() {
            for j in 0..params.w1.ncols() {
                let mut plus = params.clone();
                plus.w1[(m, j)] += h;
                let mut minus = params.clone();
                minus.w1[(m, j)] -= h;
                check(grads.w1[(m, j)], plus, minus, format!("w1[{m},{j}]"));
            }
            if params.mask.b1 {
                let mut plus = params.clone();
                plus.b1[m] += h;
                let mut minus = params.clone();
                minus.b1[m] -= h;
                check(grads.b1[m], plus, minus, format!("b1[{m}]"));
            }
            if params.mask.w2 {
                let mut plus = params.clone();
                plus.w2[m] += h;
                let mut minus = params.clone();
                minus.w2[m] -= h;
                check(grads.w2[m], plus, minus, format!("w2[{m}]"));
            }
        }
        if params.mask.b2 {
            let mut plus = params.clone();
            plus.b2 += h;
            let mut minus = params.clone();
            minus.b2 -= h;
            check(grads.b2, plus, minus, "b2".into());
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = crate::rng::root(19);
        let batch = toy_batch();
        for activation in [Activation::Relu, Activation::Sigmoid] {
            for _ in 0..10 {
                let params = init_params(
                    3,
                    3,
                    0.5,
                    ArchPreset::TwoLayer { hidden: 3, activation },
                    &mut rng,
                )
                .unwrap();
                finite_difference_check(&params, &batch, 1e-4);
            }
        }
    }

    #[test]
    fn zero_learning_rate_keeps_the_trajectory_constant() {
        let model = StimulusModel::nlgp(10, 1.0, &[1.0, 2.0]).unwrap();
        let cfg = TrainConfig {
            tau: 0.0,
            steps: 20,
            batch_size: 16,
            init_variance: 0.1,
            seed: 3,
            snapshot_stride: 5,
        };
        let run = train(&model, ArchPreset::SingleNeuron, &cfg).unwrap();
        let first = &run.trajectory.weights[0];
        for w in &run.trajectory.weights {
            assert_eq!(w, first);
        }
    }

    #[test]
    fn training_is_deterministic_and_respects_the_mask() {
        let model = StimulusModel::nlgp(10, 3.0, &[1.0, 2.0]).unwrap();
        let cfg = TrainConfig {
            tau: 0.05,
            steps: 50,
            batch_size: 64,
            init_variance: 0.1,
            seed: 11,
            snapshot_stride: 10,
        };
        let preset = ArchPreset::Scm { hidden: 4, activation: Activation::Sigmoid };
        let a = train(&model, preset, &cfg).unwrap();
        let b = train(&model, preset, &cfg).unwrap();
        assert_eq!(a.trajectory.weights, b.trajectory.weights);
        assert_eq!(a.losses, b.losses);
        for &v in a.params.w2.iter() {
            assert_eq!(v, 0.25);
        }
    }
}
