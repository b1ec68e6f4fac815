use rf_lab::nets::*;
use rf_lab::stimulus::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let k: f64 = args[1].parse().unwrap();
    let act = if args[2] == "relu" { Activation::Relu } else { Activation::Sigmoid };
    let tau: f64 = args[3].parse().unwrap();
    let steps: usize = args[4].parse().unwrap();
    let seed: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1);
    let model = StimulusModel::kur(40, k, &[0.3, 0.7]).unwrap();
    let preset = ArchPreset::TwoLayer { hidden: 10, activation: act };
    let cfg = TrainConfig { tau, steps, batch_size: 500, init_variance: 0.1, seed, snapshot_stride: steps };
    match train(&model, preset, &cfg) {
        Ok(run) => {
            let iprs: Vec<f64> = run.params.w1.rows().into_iter()
                .map(|r| rf_lab::metrics::ipr(&r.to_vec()).unwrap()).collect();
            let loc = iprs.iter().filter(|&&v| v >= 0.3).count();
            println!("kur({k}) {} tau={tau} steps={steps} seed={seed}: loss {:.4} localized {loc}/10",
                args[2], run.losses.last().unwrap());
            println!("  iprs: {}", iprs.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" "));
            println!("  w2:   {}", run.params.w2.iter().map(|v| format!("{v:+.2}")).collect::<Vec<_>>().join(" "));
        }
        Err(e) => println!("kur({k}) {} tau={tau}: {e}", args[2]),
    }
}
