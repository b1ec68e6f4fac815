//! Predict where the trained receptive field peaks by integrating the
//! effective flow from the same initialization, across several seeds.
//!
//! Run with: `cargo run --release --example peak_prediction`

use rf_lab::harness::{run_experiment, ExperimentConfig};

fn main() -> rf_lab::Result<()> {
    let mut cfg = ExperimentConfig::new("peak_prediction");
    cfg.seeds = (0..5).collect();
    cfg.out_dir = Some("out/examples/peak_prediction".into());
    let report = run_experiment(&cfg)?;
    let table = report.table("peaks").expect("peaks table");
    let (m, d) = (table.col("exact_match"), table.col("circular_distance"));
    println!("{:>6} {:>11} {:>10} {:>7} {:>9}", "seed", "train peak", "flow peak", "match", "distance");
    for row in &table.rows {
        println!(
            "{:>6} {:>11} {:>10} {:>7} {:>9}",
            row[table.col("seed")], row[table.col("train_peak")], row[table.col("flow_peak")],
            if row[m] > 0.5 { "yes" } else { "no" }, row[d]
        );
    }
    let frac = table.rows.iter().filter(|r| r[m] > 0.5).count() as f64 / table.rows.len() as f64;
    println!("\nexact-match fraction: {frac:.2}");
    Ok(())
}
