use rf_lab::flow::{integrate_flow, phi, FlowConfig, MarginalSpec};
use rf_lab::metrics::{circular_distance, ipr, peak_index};
use rf_lab::nets::{init_params, train, ArchPreset, TrainConfig};
use rf_lab::rng::root;
use rf_lab::stimulus::StimulusModel;
use std::time::Instant;

fn main() {
    let n = 40;
    let model = StimulusModel::ising(n, &[0.3, 0.7]).unwrap();
    let sigma0 = model.class_covariance(0).unwrap();
    let sigma1 = model.class_covariance(1).unwrap();
    let marginal = MarginalSpec::two_point(1.0).unwrap();
    let amp = move |a: f64| phi(&marginal, a).unwrap();
    let mut matches = 0;
    for seed in 0..4u64 {
        let t0 = Instant::now();
        let mut cfg = TrainConfig::single_neuron(seed);
        cfg.steps = 5_000;
        cfg.batch_size = 500;
        let run = train(&model, ArchPreset::SingleNeuron, &cfg).unwrap();
        let t_train = t0.elapsed().as_secs_f64();
        let mut init_rng = root(seed);
        let w0 = init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)
            .unwrap().w1.row(0).to_vec();
        let fcfg = FlowConfig { dt: 1.0, steps: 5_000, tau: cfg.tau, record_stride: 5_000, ..FlowConfig::with_tau(cfg.tau) };
        let t1 = Instant::now();
        let traj = integrate_flow(&sigma0, &sigma1, &amp, &w0, &fcfg).unwrap();
        let w_sim = run.trajectory.final_unit(0);
        let w_flow = traj.final_unit(0);
        let (ps, pf) = (peak_index(&w_sim).unwrap(), peak_index(&w_flow).unwrap());
        if ps == pf { matches += 1; }
        println!("seed {seed}: train {:.1}s flow {:.1}s | sim ipr {:.2} peak {:2} | flow ipr {:.2} peak {:2} | dist {}",
            t_train, t1.elapsed().as_secs_f64(), ipr(&w_sim).unwrap(), ps, ipr(&w_flow).unwrap(), pf,
            circular_distance(ps, pf, n));
    }
    println!("matches {matches}/4");
}
