use rf_lab::nets::*;
use rf_lab::stimulus::*;
use rf_lab::rng::root;

fn run(act: Activation, init_var: f64, tau: f64, steps: usize, batch: usize,
       mask_override: Option<TrainableMask>, xi: (f64, f64), kk: f64) -> (f64, usize, Vec<f64>) {
    let model = StimulusModel::kur(40, kk, &[xi.0, xi.1]).unwrap();
    let preset = ArchPreset::Scm { hidden: 10, activation: act };
    let mut rng = root(1);
    let mut params = init_params(10, 40, init_var, preset, &mut rng).unwrap();
    if let Some(m) = mask_override { params.mask = m; }
    let mut last_loss = f64::NAN;
    for _ in 0..steps {
        let b = task_sample(&model, batch, &mut rng).unwrap();
        let (loss, grads) = mse_and_grad(&params, &b).unwrap();
        if !loss.is_finite() { return (loss, 0, vec![]); }
        last_loss = loss;
        apply_gradients(&mut params, &grads, tau);
    }
    let iprs: Vec<f64> = params.w1.rows().into_iter().map(|r| rf_lab::metrics::ipr(&r.to_vec()).unwrap()).collect();
    let loc = iprs.iter().filter(|&&v| v >= 0.3).count();
    (last_loss, loc, iprs)
}

fn main() {
    let b2only = TrainableMask { w1: true, b1: false, w2: false, b2: true };
    let cases: Vec<(&str, Activation, f64, f64, Option<TrainableMask>, (f64, f64))> = vec![
        ("relu b2-learn", Activation::Relu, 0.1, 0.1, Some(b2only), (0.3, 0.7)),
        ("relu b2-learn", Activation::Relu, 0.1, 0.5, Some(b2only), (0.3, 0.7)),
        ("relu frozen init4", Activation::Relu, 4.0, 0.5, None, (0.3, 0.7)),
        ("relu frozen init1", Activation::Relu, 1.0, 0.5, None, (0.3, 0.7)),
        ("relu frozen init.01", Activation::Relu, 0.01, 0.5, None, (0.3, 0.7)),
        ("sigm b-learn init1", Activation::Sigmoid, 1.0, 0.5,
            Some(TrainableMask { w1: true, b1: true, w2: false, b2: true }), (0.3, 0.7)),
        ("sigm frozen xi13", Activation::Sigmoid, 0.1, 0.5, None, (1.0, 3.0)),
        ("relu frozen xi13", Activation::Relu, 0.1, 0.5, None, (1.0, 3.0)),
    ];
    for (name, act, iv, tau, mask, xi) in cases {
        let (loss, loc, iprs) = run(act, iv, tau, 20_000, 250, mask, xi, 10.0);
        println!("{name:22} iv={iv:<5} tau={tau:<4} xi={xi:?}: loss {loss:.4} localized {loc}/10 iprs {}",
            iprs.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" "));
    }
}
