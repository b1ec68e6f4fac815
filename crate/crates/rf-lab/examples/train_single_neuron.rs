//! Train the single ReLU neuron on saturated vs near-Gaussian stimuli and
//! watch localization appear in one case only.
//!
//! Run with: `cargo run --release --example train_single_neuron`

use rf_lab::metrics::{ipr, localization_verdict, peak_index, DEFAULT_IPR_THRESHOLD};
use rf_lab::nets::{train, ArchPreset, TrainConfig};
use rf_lab::stimulus::StimulusModel;

fn main() -> rf_lab::Result<()> {
    let n = 40;
    let cases = vec![
        ("nlgp(g = 100), binary-like marginals", StimulusModel::nlgp(n, 100.0, &[0.3, 0.7])?),
        ("nlgp(g = 0.01), Gaussian marginals", StimulusModel::nlgp(n, 0.01, &[0.3, 0.7])?),
    ];
    let out = std::path::Path::new("out/examples");
    std::fs::create_dir_all(out)?;
    for (name, model) in cases {
        let mut cfg = TrainConfig::single_neuron(3);
        cfg.steps = 2_500;
        cfg.batch_size = 500;
        let run = train(&model, ArchPreset::SingleNeuron, &cfg)?;
        let w = run.trajectory.final_unit(0);
        let early: f64 = run.losses[..100].iter().sum::<f64>() / 100.0;
        let late: f64 = run.losses[run.losses.len() - 100..].iter().sum::<f64>() / 100.0;
        println!("{name}");
        println!("  loss (first/last 100-step mean): {early:.4} -> {late:.4}");
        println!(
            "  final IPR {:.3}, peak index {}, verdict {:?}",
            ipr(&w)?,
            peak_index(&w)?,
            localization_verdict(&w, DEFAULT_IPR_THRESHOLD)?
        );
        let tag = if name.contains("100") { "g100" } else { "g001" };
        let mut file = std::io::BufWriter::new(std::fs::File::create(
            out.join(format!("train_{tag}_trajectory.csv")),
        )?);
        rf_lab::io::write_trajectory_csv(&mut file, &run.trajectory, 0)?;
    }
    println!("\ntrajectories written to out/examples/train_*_trajectory.csv");
    Ok(())
}
