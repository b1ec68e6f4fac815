//! End-to-end harness contracts: experiment artifacts on disk, byte-level
//! reproducibility, schema rejection, and the CLI surface.

use std::fs;
use std::process::Command;

use rf_lab::harness::{parse_config, run_experiment, ExperimentConfig};
use rf_lab::io::check_csv_schema;

fn tiny_theory_cfg(dir: &std::path::Path) -> ExperimentConfig {
    let overrides = parse_config(
        "[train]\nsteps = 40\nbatch_size = 64\nsnapshot_stride = 20\n[flow]\nsteps = 200\nrecord_stride = 100\n",
    )
    .unwrap();
    let mut cfg = ExperimentConfig::new("theory_vs_sim");
    cfg.seeds = vec![0];
    cfg.out_dir = Some(dir.to_path_buf());
    cfg.overrides = overrides;
    cfg
}

#[test]
fn experiment_writes_versioned_artifacts_and_reruns_byte_identical() {
    let base = std::env::temp_dir().join(format!("rf-lab-test-{}", std::process::id()));
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    let report_a = run_experiment(&tiny_theory_cfg(&dir_a)).unwrap();
    let report_b = run_experiment(&tiny_theory_cfg(&dir_b)).unwrap();
    assert_eq!(report_a.config_hash, report_b.config_hash);

    let metrics_a = fs::read(dir_a.join("theory_vs_sim_metrics.csv")).unwrap();
    let metrics_b = fs::read(dir_b.join("theory_vs_sim_metrics.csv")).unwrap();
    assert_eq!(metrics_a, metrics_b, "reruns with one config hash must be byte-identical");

    let svg_a = fs::read(dir_a.join("theory_vs_sim_summary.svg")).unwrap();
    let svg_b = fs::read(dir_b.join("theory_vs_sim_summary.svg")).unwrap();
    assert_eq!(svg_a, svg_b);

    let first_line = String::from_utf8(metrics_a).unwrap().lines().next().unwrap().to_string();
    check_csv_schema(&first_line, "metrics").unwrap();
    assert!(check_csv_schema(&first_line, "batch").is_err());
    assert!(first_line.contains(&format!("{:016x}", report_a.config_hash)));

    for name in ["theory_vs_sim_aggregates.csv", "theory_vs_sim_comparison.csv"] {
        assert!(dir_a.join(name).exists(), "{name} missing");
    }
    fs::remove_dir_all(&base).ok();
}

#[test]
fn unknown_schema_versions_are_rejected() {
    assert!(check_csv_schema("# rf-lab csv v2 schema=metrics", "metrics").is_err());
    assert!(check_csv_schema("", "metrics").is_err());
}

#[test]
fn cli_surface_runs() {
    let bin = env!("CARGO_BIN_EXE_rf-lab");
    let tmp = std::env::temp_dir().join(format!("rf-lab-cli-{}", std::process::id()));
    fs::create_dir_all(&tmp).unwrap();

    let list = Command::new(bin).args(["experiment", "--list"]).output().unwrap();
    assert!(list.status.success());
    let text = String::from_utf8(list.stdout).unwrap();
    for id in ["kurtosis_sweep", "peak_prediction", "elliptical", "theory_vs_sim", "scm", "two_layer", "breakdown", "ica_compare"] {
        assert!(text.contains(id), "registry listing missing {id}");
    }

    let batch_csv = tmp.join("batch.csv");
    let sample = Command::new(bin)
        .args(["sample", "--family", "kur", "--k", "8", "--n", "12", "--xi0", "1", "--xi1", "2"])
        .args(["--batch", "50", "--seed", "3", "--out"])
        .arg(&batch_csv)
        .output()
        .unwrap();
    assert!(sample.status.success(), "{}", String::from_utf8_lossy(&sample.stderr));
    let text = fs::read_to_string(&batch_csv).unwrap();
    assert!(text.lines().next().unwrap().contains("schema=batch"));
    assert_eq!(text.lines().nth(1).unwrap(), "x0,x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,x11,y");
    assert_eq!(text.lines().count(), 2 + 50);

    let amp_csv = tmp.join("amp.csv");
    let phi = Command::new(bin)
        .args(["phi", "--marginal", "two-point", "--points", "21", "--out"])
        .arg(&amp_csv)
        .output()
        .unwrap();
    assert!(phi.status.success());

    // nonzero exit with a machine-readable error line
    let bad = Command::new(bin)
        .args(["experiment", "definitely-not-registered"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.starts_with("error code=unknown-experiment"), "stderr was {err:?}");

    fs::remove_dir_all(&tmp).ok();
}

#[test]
fn config_grammar_round_trip() {
    let doc = parse_config("[experiment]\nseeds = 1,2,3\nfull = true\n[train]\ntau = 0.125\n").unwrap();
    assert_eq!(doc.get_u64_list("experiment", "seeds").unwrap().unwrap(), vec![1, 2, 3]);
    assert_eq!(doc.get_bool("experiment", "full").unwrap(), Some(true));
    assert_eq!(doc.get_f64("train", "tau").unwrap(), Some(0.125));
    assert!(parse_config("[train]\nnot_a_key = 1\n").is_err());
}
