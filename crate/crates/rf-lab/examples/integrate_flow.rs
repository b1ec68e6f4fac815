//! Integrate the effective single-neuron weight flow on the Ising task and
//! compare its fixed point with a trained network started from the same
//! initialization.
//!
//! Run with: `cargo run --release --example integrate_flow`

use rf_lab::flow::{integrate_flow, phi, FlowConfig, MarginalSpec};
use rf_lab::metrics::{circular_distance, ipr, peak_index};
use rf_lab::nets::{init_params, train, ArchPreset, TrainConfig};
use rf_lab::rng::root;
use rf_lab::stimulus::StimulusModel;

fn main() -> rf_lab::Result<()> {
    let n = 40;
    let seed = 5;
    let model = StimulusModel::ising(n, &[0.3, 0.7])?;
    let sigma0 = model.class_covariance(0)?;
    let sigma1 = model.class_covariance(1)?;

    // spin marginals are +-1, so the amplifier collapses to a closed form
    let marginal = MarginalSpec::two_point(1.0)?;
    let amplifier = move |a: f64| phi(&marginal, a).expect("clamped argument");

    let mut cfg = TrainConfig::single_neuron(seed);
    cfg.steps = 2_500;
    cfg.batch_size = 500;
    let run = train(&model, ArchPreset::SingleNeuron, &cfg)?;

    let mut init_rng = root(seed);
    let w0 = init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)?
        .w1
        .row(0)
        .to_vec();
    let flow_cfg = FlowConfig { dt: 1.0, steps: 20_000, tau: cfg.tau, record_stride: 2_000, ..FlowConfig::with_tau(cfg.tau) };
    let traj = integrate_flow(&sigma0, &sigma1, &amplifier, &w0, &flow_cfg)?;

    let w_sim = run.trajectory.final_unit(0);
    let w_flow = traj.final_unit(0);
    let (p_sim, p_flow) = (peak_index(&w_sim)?, peak_index(&w_flow)?);
    println!("trained neuron : IPR {:.3}, peak {}", ipr(&w_sim)?, p_sim);
    println!("integrated flow: IPR {:.3}, peak {}", ipr(&w_flow)?, p_flow);
    println!(
        "peak agreement : circular distance {} ({})",
        circular_distance(p_sim, p_flow, n),
        if p_sim == p_flow { "exact match" } else { "mismatch" }
    );

    let out = std::path::Path::new("out/examples");
    std::fs::create_dir_all(out)?;
    let mut file =
        std::io::BufWriter::new(std::fs::File::create(out.join("flow_trajectory.csv"))?);
    rf_lab::io::write_trajectory_csv(&mut file, &traj, 0)?;
    println!("\nflow trajectory written to out/examples/flow_trajectory.csv");
    Ok(())
}
