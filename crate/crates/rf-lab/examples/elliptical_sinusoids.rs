//! Train the single neuron on three elliptical ensembles and fit sinusoids
//! to the final receptive fields: elliptical symmetry forbids localization
//! regardless of how heavy the tails are.
//!
//! Run with: `cargo run --release --example elliptical_sinusoids`

use rf_lab::harness::{run_experiment, ExperimentConfig};

fn main() -> rf_lab::Result<()> {
    let mut cfg = ExperimentConfig::new("elliptical");
    cfg.out_dir = Some("out/examples/elliptical".into());
    let report = run_experiment(&cfg)?;
    let table = report.table("sinusoid_fits").expect("sinusoid_fits table");
    let names = ["t40(nu=3)", "shell", "custom radial"];
    println!("{:>14} {:>16} {:>8} {:>16}", "ensemble", "train residual", "fit k", "flow residual");
    for row in &table.rows {
        println!(
            "{:>14} {:>15.2}% {:>8} {:>15.2}%",
            names[row[table.col("config_index")] as usize],
            100.0 * row[table.col("train_rel_residual")],
            row[table.col("train_fit_k")],
            100.0 * row[table.col("flow_rel_residual")],
        );
    }
    println!("\nartifacts in out/examples/elliptical/");
    Ok(())
}
