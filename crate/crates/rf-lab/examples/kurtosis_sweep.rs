//! Desk-scale localization sweep: single neuron across NLGP gains and Kur
//! tail indices, reported as mean IPR against measured excess kurtosis.
//!
//! Run with: `cargo run --release --example kurtosis_sweep`
//! (three seeds here; `rf-lab experiment kurtosis_sweep` runs the full set)

use rf_lab::harness::{run_experiment, ExperimentConfig};

fn main() -> rf_lab::Result<()> {
    let mut cfg = ExperimentConfig::new("kurtosis_sweep");
    cfg.seeds = vec![0, 1, 2];
    cfg.out_dir = Some("out/examples/kurtosis_sweep".into());
    let report = run_experiment(&cfg)?;
    println!("{:>12} {:>10} {:>10} {:>8}", "config", "kurtosis", "mean IPR", "std");
    for agg in &report.aggregates {
        println!(
            "{:>12} {:>+10.3} {:>10.3} {:>8.3}",
            agg.config_id, agg.mean_excess_kurtosis, agg.mean_ipr, agg.std_ipr
        );
    }
    println!("\nartifacts in out/examples/kurtosis_sweep/");
    Ok(())
}
