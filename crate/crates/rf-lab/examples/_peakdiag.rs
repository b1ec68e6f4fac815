use rf_lab::flow::{eq5_rhs, integrate_flow, phi, FlowConfig, MarginalSpec, empirical_flow_rhs};
use rf_lab::metrics::peak_index;
use rf_lab::nets::{init_params, train, ArchPreset, TrainConfig};
use rf_lab::rng::{root, substream};
use rf_lab::stimulus::StimulusModel;

fn main() {
    let n = 40;
    let seed = 0u64;
    let model = StimulusModel::ising(n, &[0.3, 0.7]).unwrap();
    let sigma0 = model.class_covariance(0).unwrap();
    let sigma1 = model.class_covariance(1).unwrap();
    let marginal = MarginalSpec::two_point(1.0).unwrap();
    let amp = move |a: f64| phi(&marginal, a).unwrap();

    let mut cfg = TrainConfig::single_neuron(seed);
    cfg.steps = 2_500;
    cfg.batch_size = 500;
    let run = train(&model, ArchPreset::SingleNeuron, &cfg).unwrap();
    let mut init_rng = root(seed);
    let w0 = init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)
        .unwrap().w1.row(0).to_vec();
    let fcfg = FlowConfig { dt: 1.0, steps: 2_500, tau: cfg.tau, record_stride: 2_500, ..FlowConfig::with_tau(cfg.tau) };
    let flow = integrate_flow(&sigma0, &sigma1, &amp, &w0, &fcfg).unwrap();

    // Monte-Carlo integration of the exact K-class flow from the same init
    let mut w_mc = w0.clone();
    let mut mc_rng = substream(seed, 777);
    for _ in 0..2_500 {
        let rhs = empirical_flow_rhs(&model, &w_mc, 1_000, &mut mc_rng).unwrap();
        for (w, r) in w_mc.iter_mut().zip(&rhs) {
            *w += cfg.tau * r;
        }
    }

    let w_sim = run.trajectory.final_unit(0);
    let w_flow = flow.final_unit(0);
    println!("peaks: sim {} | analytic flow {} | mc flow {}",
        peak_index(&w_sim).unwrap(), peak_index(&w_flow).unwrap(), peak_index(&w_mc).unwrap());
    println!("{:>3} {:>9} {:>9} {:>9} {:>9}", "i", "w0", "sim", "flow", "mcflow");
    for i in 0..n {
        println!("{i:>3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}", w0[i], w_sim[i], w_flow[i], w_mc[i]);
    }
    // sanity: eq5 rhs at init vs empirical rhs at init
    let (rhs5, _) = eq5_rhs(&sigma0, &sigma1, &amp, &w0).unwrap();
    let mut rng2 = substream(seed, 778);
    let emp = empirical_flow_rhs(&model, &w0, 200_000, &mut rng2).unwrap();
    let max_diff = rhs5.iter().zip(&emp).map(|(a, b)| (0.5 * a - b).abs()).fold(0.0, f64::max);
    println!("max |eq5/2 - empirical| at init: {max_diff:.4}");
}
