//! FastICA on heavy-tailed Kur(3) task data: independent-component filters
//! localize even though the trained network on the same data does not —
//! ICA rewards any non-Gaussianity, the network only negative kurtosis.
//!
//! Run with: `cargo run --release --example ica_components`

use rf_lab::harness::{run_experiment, ExperimentConfig};

fn main() -> rf_lab::Result<()> {
    let mut cfg = ExperimentConfig::new("ica_compare");
    cfg.out_dir = Some("out/examples/ica_compare".into());
    let report = run_experiment(&cfg)?;
    for id in ["ica-kur3", "single-neuron-kur3"] {
        let rows = report.rows_for(id);
        let localized = rows.iter().filter(|r| r.ipr >= 0.3).count();
        println!(
            "{id:20} {} receptive fields, {} localized (IPR >= 0.3), data kurtosis {:+.2}",
            rows.len(),
            localized,
            rows[0].excess_kurtosis
        );
    }
    println!("\ncomponent heatmap in out/examples/ica_compare/ica_compare_summary.svg");
    Ok(())
}
