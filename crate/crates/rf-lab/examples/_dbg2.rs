use rf_lab::nets::*;
use rf_lab::stimulus::*;
use rf_lab::rng::root;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let hidden: usize = args[1].parse().unwrap();
    let tau: f64 = args[2].parse().unwrap();
    let steps: usize = args[3].parse().unwrap();
    let batch: usize = args[4].parse().unwrap();
    let k: f64 = args[5].parse().unwrap();
    let init_var: f64 = args[6].parse().unwrap();
    let act = if args[7] == "relu" { Activation::Relu } else { Activation::Sigmoid };
    let model = StimulusModel::kur(40, k, &[0.3, 0.7]).unwrap();
    let preset = ArchPreset::Scm { hidden, activation: act };
    let mut rng = root(1);
    let mut params = init_params(hidden, 40, init_var, preset, &mut rng).unwrap();
    for step in 0..steps {
        let b = task_sample(&model, batch, &mut rng).unwrap();
        let (loss, grads) = mse_and_grad(&params, &b).unwrap();
        apply_gradients(&mut params, &grads, tau);
        if step % (steps / 12) == 0 || step == steps - 1 {
            let iprs: Vec<f64> = params.w1.rows().into_iter().map(|r| rf_lab::metrics::ipr(&r.to_vec()).unwrap()).collect();
            let norms: Vec<f64> = params.w1.rows().into_iter().map(|r| r.iter().map(|v| v*v).sum::<f64>().sqrt()).collect();
            let loc = iprs.iter().filter(|&&v| v >= 0.3).count();
            println!("step {step:6}: loss {loss:.4} |w| {:.3} localized {loc}/{hidden} iprs {}",
                norms.iter().sum::<f64>() / hidden as f64,
                iprs.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" "));
        }
    }
}
