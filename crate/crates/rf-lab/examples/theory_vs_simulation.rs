//! Side-by-side check of trained receptive fields against integration of
//! the early-time flow with the cubic amplifier surrogate, for one seed on
//! the Ising, near-Gaussian NLGP, and Kur(5) tasks.
//!
//! Run with: `cargo run --release --example theory_vs_simulation`

use rf_lab::harness::{run_experiment, ExperimentConfig};

fn main() -> rf_lab::Result<()> {
    let mut cfg = ExperimentConfig::new("theory_vs_sim");
    cfg.out_dir = Some("out/examples/theory_vs_sim".into());
    let report = run_experiment(&cfg)?;
    let table = report.table("comparison").expect("comparison table");
    let rows = ["ising", "nlgp-g0.01", "kur-k5"];
    println!("{:>12} {:>9} {:>9} {:>10} {:>9} {:>9}", "task", "sim IPR", "flow IPR", "peak dist", "c1", "c3");
    for row in &table.rows {
        println!(
            "{:>12} {:>9.3} {:>9.3} {:>10} {:>9.4} {:>+9.4}",
            rows[row[table.col("row")] as usize],
            row[table.col("sim_ipr")],
            row[table.col("flow_ipr")],
            row[table.col("peak_distance")],
            row[table.col("c1")],
            row[table.col("c3")],
        );
    }
    println!("\ntrajectories and summary SVG in out/examples/theory_vs_sim/");
    Ok(())
}
