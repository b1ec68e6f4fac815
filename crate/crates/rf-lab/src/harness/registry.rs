//! The experiment registry: one runnable pipeline per figure-level claim.
//!
//! Every entry runs at a desk-scale default budget; `--full` switches to
//! paper-scale seed counts and step budgets. Cells (config x seed) are
//! independent, own their RNG substreams, and merge deterministically.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::flow::{
    elliptical_flow_constant, integrate_elliptical_flow, integrate_flow, phi, phi_taylor3,
    AmplifierTable, FlowConfig, MarginalSpec,
};
use crate::harness::config::{config_hash, ConfigDoc};
use crate::harness::report::{AuxTable, ExperimentReport, FailureRow, MetricRow, Series};
use crate::harness::svg::{emit_svg, PlotKind};
use crate::harness::run_cells;
use crate::io::write_trajectory_csv;
use crate::metrics;
use crate::nets::{init_params, train, Activation, ArchPreset, TrainConfig};
use crate::rng::substream;
use crate::stimulus::{sqexp_covariance, task_sample, RadialLaw, StimulusModel};
use crate::trajectory::WeightTrajectory;

/// What the caller asks for.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub id: String,
    /// Empty means the entry's default seed list.
    pub seeds: Vec<u64>,
    /// Output directory for CSV/SVG artifacts; `None` keeps the run
    /// in-memory.
    pub out_dir: Option<PathBuf>,
    /// Paper-scale budgets instead of desk-scale ones.
    pub full: bool,
    pub overrides: ConfigDoc,
}

impl ExperimentConfig {
    pub fn new(id: &str) -> Self {
        ExperimentConfig {
            id: id.to_string(),
            seeds: Vec::new(),
            out_dir: None,
            full: false,
            overrides: ConfigDoc::default(),
        }
    }
}

/// Resolved context handed to the experiment bodies.
#[derive(Debug, Clone)]
pub struct RunCtx {
    pub seeds: Vec<u64>,
    pub full: bool,
    pub hash: u64,
    pub overrides: ConfigDoc,
    pub out_dir: Option<PathBuf>,
}

impl RunCtx {
    /// Single-neuron training defaults (desk scale unless `full`), with
    /// `[train]` overrides applied.
    fn train_single(&self, seed: u64) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::single_neuron(seed);
        if !self.full {
            cfg.steps = 2_500;
            cfg.batch_size = 500;
            cfg.snapshot_stride = 50;
        }
        self.apply_train_overrides(&mut cfg)?;
        Ok(cfg)
    }

    /// Multi-neuron training defaults, with `[train]` overrides applied.
    fn train_multi(&self, seed: u64) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::multi_neuron(seed);
        if !self.full {
            cfg.steps = 6_000;
            cfg.batch_size = 500;
            cfg.snapshot_stride = 100;
        }
        self.apply_train_overrides(&mut cfg)?;
        Ok(cfg)
    }

    fn apply_train_overrides(&self, cfg: &mut TrainConfig) -> Result<()> {
        if let Some(v) = self.overrides.get_f64("train", "tau")? {
            cfg.tau = v;
        }
        if let Some(v) = self.overrides.get_usize("train", "steps")? {
            cfg.steps = v;
        }
        if let Some(v) = self.overrides.get_usize("train", "batch_size")? {
            cfg.batch_size = v;
        }
        if let Some(v) = self.overrides.get_f64("train", "init_variance")? {
            cfg.init_variance = v;
        }
        if let Some(v) = self.overrides.get_usize("train", "snapshot_stride")? {
            cfg.snapshot_stride = v;
        }
        Ok(())
    }

    /// Steady-state flow integration defaults, with `[flow]` overrides.
    fn flow_steady(&self, tau: f64) -> Result<FlowConfig> {
        let mut cfg = FlowConfig {
            dt: 1.0,
            steps: if self.full { 100_000 } else { 20_000 },
            tau,
            record_stride: 5_000,
            ..FlowConfig::with_tau(tau)
        };
        if let Some(v) = self.overrides.get_f64("flow", "dt")? {
            cfg.dt = v;
        }
        if let Some(v) = self.overrides.get_usize("flow", "steps")? {
            cfg.steps = v;
        }
        if let Some(v) = self.overrides.get_usize("flow", "record_stride")? {
            cfg.record_stride = v;
        }
        if let Some(v) = self.overrides.get_f64("flow", "c")? {
            cfg.c_elliptical = v;
        }
        Ok(cfg)
    }

    fn write_trajectory(&self, name: &str, traj: &WeightTrajectory) -> Result<()> {
        if let Some(dir) = &self.out_dir {
            let mut w = BufWriter::new(File::create(dir.join(format!("{name}.csv")))?);
            write_trajectory_csv(&mut w, traj, self.hash)?;
        }
        Ok(())
    }
}

/// Everything a single cell may contribute to the report.
#[derive(Debug, Clone, Default)]
struct CellOut {
    rows: Vec<MetricRow>,
    failures: Vec<FailureRow>,
    /// (table name, rows) appended to pre-declared aux tables.
    aux: Vec<(String, Vec<Vec<f64>>)>,
    curves: Vec<Series>,
    /// Labeled weight vectors stacked into the heatmap payload.
    weights: Vec<(String, Vec<f64>)>,
}

impl CellOut {
    fn failure(seed: u64, config_id: &str, err: &Error) -> Self {
        CellOut {
            failures: vec![FailureRow {
                seed,
                config_id: config_id.to_string(),
                code: err.code().to_string(),
                message: err.to_string(),
            }],
            ..Default::default()
        }
    }
}

type Sink<'a> = &'a mut dyn FnMut(&[MetricRow]) -> Result<()>;
type RunFn = fn(&RunCtx, &mut ExperimentReport, Sink) -> Result<()>;

/// A registry entry.
pub struct ExperimentDef {
    pub id: &'static str,
    pub description: &'static str,
    pub plot: PlotKind,
    default_seeds: fn(bool) -> Vec<u64>,
    run: RunFn,
}

fn seeds_upto(n: usize) -> Vec<u64> {
    (0..n as u64).collect()
}

/// All registered experiments.
pub fn registry() -> &'static [ExperimentDef] {
    &[
        ExperimentDef {
            id: "kurtosis_sweep",
            description: "single neuron IPR vs excess kurtosis over NLGP gain and Kur tail grids",
            plot: PlotKind::ScatterErrorBars,
            default_seeds: |full| seeds_upto(if full { 30 } else { 10 }),
            run: run_kurtosis_sweep,
        },
        ExperimentDef {
            id: "peak_prediction",
            description: "peak agreement between the integrated flow and the trained neuron on the Ising task",
            plot: PlotKind::Line,
            default_seeds: |full| seeds_upto(if full { 28 } else { 20 }),
            run: run_peak_prediction,
        },
        ExperimentDef {
            id: "elliptical",
            description: "sinusoidal receptive fields on Student-t, shell, and custom-radial elliptical data",
            plot: PlotKind::WeightHeatmap,
            default_seeds: |full| seeds_upto(if full { 3 } else { 1 }),
            run: run_elliptical,
        },
        ExperimentDef {
            id: "theory_vs_sim",
            description: "trained weights vs cubic-surrogate flow integration on Ising, NLGP, Kur",
            plot: PlotKind::Line,
            default_seeds: |_| seeds_upto(1),
            run: run_theory_vs_sim,
        },
        ExperimentDef {
            id: "scm",
            description: "soft committee machine on Kur(10) vs Kur(4)",
            plot: PlotKind::WeightHeatmap,
            default_seeds: |full| seeds_upto(if full { 3 } else { 1 }),
            run: run_scm,
        },
        ExperimentDef {
            id: "two_layer",
            description: "fully trainable two-layer network on Kur(4) sigmoid and Kur(30) relu",
            plot: PlotKind::WeightHeatmap,
            default_seeds: |full| seeds_upto(if full { 3 } else { 1 }),
            run: run_two_layer,
        },
        ExperimentDef {
            id: "breakdown",
            description: "analytical vs trained weights across time on NLGP(100) and NLGP(0.01)",
            plot: PlotKind::Line,
            default_seeds: |full| seeds_upto(if full { 4 } else { 1 }),
            run: run_breakdown,
        },
        ExperimentDef {
            id: "ica_compare",
            description: "FastICA localizes on Kur(3) while the single neuron does not",
            plot: PlotKind::WeightHeatmap,
            default_seeds: |full| seeds_upto(if full { 3 } else { 1 }),
            run: run_ica_compare,
        },
    ]
}

pub fn find_experiment(id: &str) -> Result<&'static ExperimentDef> {
    registry()
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownExperiment(id.to_string()))
}

/// Run one registry entry end to end: execute its cells on the worker pool,
/// stream metric rows incrementally when an output directory is set, then
/// emit aggregate CSVs and the SVG summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let def = find_experiment(&cfg.id)?;
    let seeds =
        if cfg.seeds.is_empty() { (def.default_seeds)(cfg.full) } else { cfg.seeds.clone() };
    let seeds_text = seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    let hash = config_hash(&[
        def.id,
        &seeds_text,
        if cfg.full { "full" } else { "desk" },
        &cfg.overrides.canonical_text(),
    ]);
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
    }
    let ctx = RunCtx {
        seeds,
        full: cfg.full,
        hash,
        overrides: cfg.overrides.clone(),
        out_dir: cfg.out_dir.clone(),
    };
    let mut report = ExperimentReport::new(def.id, hash);

    let mut metrics_file = match &cfg.out_dir {
        Some(dir) => {
            let mut f = BufWriter::new(File::create(dir.join(format!("{}_metrics.csv", def.id)))?);
            writeln!(f, "{}", report.metrics_csv_header())?;
            Some(f)
        }
        None => None,
    };
    {
        let mut sink = |rows: &[MetricRow]| -> Result<()> {
            if let Some(f) = metrics_file.as_mut() {
                for row in rows {
                    writeln!(
                        f,
                        "{},{},{},{},{},{},{}",
                        row.seed,
                        row.config_id,
                        row.ipr,
                        row.excess_kurtosis,
                        row.fit_k,
                        row.fit_rel_residual,
                        row.peak
                    )?;
                    f.flush()?;
                }
            }
            Ok(())
        };
        (def.run)(&ctx, &mut report, &mut sink)?;
    }
    report.compute_aggregates();

    if let Some(dir) = &cfg.out_dir {
        drop(metrics_file);
        let mut f = BufWriter::new(File::create(dir.join(format!("{}_aggregates.csv", def.id)))?);
        report.write_aggregates_csv(&mut f)?;
        if !report.failures.is_empty() {
            let mut f = BufWriter::new(File::create(dir.join(format!("{}_failures.csv", def.id)))?);
            report.write_failures_csv(&mut f)?;
        }
        for table in &report.tables {
            let mut f =
                BufWriter::new(File::create(dir.join(format!("{}_{}.csv", def.id, table.name)))?);
            table.write_csv(&mut f, hash)?;
        }
        match emit_svg(&report, def.plot) {
            Ok(svg) => fs::write(dir.join(format!("{}_summary.svg", def.id)), svg)?,
            Err(Error::EmptyReport(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Merge a cell's contributions into the report and stream its rows.
fn absorb(report: &mut ExperimentReport, sink: Sink, out: &CellOut) -> Result<()> {
    sink(&out.rows)?;
    report.rows.extend(out.rows.iter().cloned());
    report.failures.extend(out.failures.iter().cloned());
    for (name, rows) in &out.aux {
        let table = report
            .tables
            .iter_mut()
            .find(|t| &t.name == name)
            .unwrap_or_else(|| panic!("aux table {name} not declared"));
        table.rows.extend(rows.iter().cloned());
    }
    report.curves.extend(out.curves.iter().cloned());
    Ok(())
}

/// Stack labeled weight vectors collected by the cells into the heatmap
/// payload, in cell order.
fn stack_weights(report: &mut ExperimentReport, outs: &[CellOut]) {
    let all: Vec<&(String, Vec<f64>)> = outs.iter().flat_map(|o| o.weights.iter()).collect();
    if all.is_empty() {
        return;
    }
    let n = all[0].1.len();
    let mut m = Array2::zeros((all.len(), n));
    for (i, (_, w)) in all.iter().enumerate() {
        for (j, v) in w.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    report.final_weights = Some(m);
}

/// Marginal excess kurtosis of the task data, estimated from pooled
/// coordinates of a dedicated batch on its own substream.
fn measured_kurtosis(model: &StimulusModel, seed: u64, coords: usize) -> Result<f64> {
    let mut rng = substream(seed, config_hash(&["kurtosis", &model.tag()]));
    let rows = coords.div_ceil(model.n()).max(8);
    let batch = task_sample(model, rows, &mut rng)?;
    let values: Vec<f64> = batch.inputs.iter().copied().collect();
    metrics::excess_kurtosis(&values)
}

/// Empirical marginal of one class, pooled over coordinates.
fn empirical_class_marginal(
    model: &StimulusModel,
    label: usize,
    min_samples: usize,
    seed: u64,
) -> Result<MarginalSpec> {
    let mut rng = substream(seed, config_hash(&["marginal", &model.tag()]));
    let rows = min_samples.div_ceil(model.n()).max(8);
    let x = model.sample_class(label, rows, &mut rng)?;
    let values: Vec<f64> = x.iter().copied().collect();
    MarginalSpec::empirical(&values)
}

// ---------------------------------------------------------------------------
// kurtosis_sweep
// ---------------------------------------------------------------------------

fn sweep_models(n: usize) -> Result<Vec<(String, StimulusModel)>> {
    let mut out = Vec::new();
    for g in [0.01, 0.5, 1.0, 3.0, 100.0] {
        out.push((format!("nlgp-g{g}"), StimulusModel::nlgp(n, g, &[0.3, 0.7])?));
    }
    for k in [4.0, 5.0, 8.0, 10.0, 30.0] {
        out.push((format!("kur-k{k}"), StimulusModel::kur(n, k, &[0.3, 0.7])?));
    }
    Ok(out)
}

fn run_kurtosis_sweep(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let kurt_coords = if ctx.full { 1_000_000 } else { 200_000 };
    let mut cells = Vec::new();
    for (id, model) in sweep_models(n)? {
        for &seed in &ctx.seeds {
            cells.push((id.clone(), model.clone(), seed));
        }
    }
    let ctx2 = ctx.clone();
    let outs = run_cells(
        cells,
        move |_, (id, model, seed)| {
            let cfg = match ctx2.train_single(*seed) {
                Ok(c) => c,
                Err(e) => return CellOut::failure(*seed, id, &e),
            };
            let kurt = match measured_kurtosis(model, *seed, kurt_coords) {
                Ok(k) => k,
                Err(e) => return CellOut::failure(*seed, id, &e),
            };
            match train(model, ArchPreset::SingleNeuron, &cfg) {
                Ok(run) => {
                    let w = run.trajectory.final_unit(0);
                    match MetricRow::measure(*seed, id, kurt, &w) {
                        Ok(row) => CellOut { rows: vec![row], ..Default::default() },
                        Err(e) => CellOut::failure(*seed, id, &e),
                    }
                }
                Err(e) => CellOut::failure(*seed, id, &e),
            }
        },
        |_, out| absorb(report, sink, out),
    )?;
    let _ = outs;
    Ok(())
}

// ---------------------------------------------------------------------------
// peak_prediction
// ---------------------------------------------------------------------------

fn run_peak_prediction(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let model = StimulusModel::ising(n, &[0.3, 0.7])?;
    let sigma0 = model.class_covariance(0)?;
    let sigma1 = model.class_covariance(1)?;
    report.tables.push(AuxTable {
        name: "peaks".into(),
        columns: vec![
            "seed".into(),
            "train_peak".into(),
            "flow_peak".into(),
            "exact_match".into(),
            "circular_distance".into(),
        ],
        rows: Vec::new(),
    });
    let ctx2 = ctx.clone();
    let cells: Vec<u64> = ctx.seeds.clone();
    let outs = run_cells(
        cells,
        move |_, &seed| {
            let id = "ising-J0.3-0.7";
            let cfg = match ctx2.train_single(seed) {
                Ok(c) => c,
                Err(e) => return CellOut::failure(seed, id, &e),
            };
            let run = match train(&model, ArchPreset::SingleNeuron, &cfg) {
                Ok(r) => r,
                Err(e) => return CellOut::failure(seed, id, &e),
            };
            // the flow starts from the same Gaussian init as the trainer
            let mut init_rng = crate::rng::root(seed);
            let w0 = match init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)
            {
                Ok(p) => p.w1.row(0).to_vec(),
                Err(e) => return CellOut::failure(seed, id, &e),
            };
            let marginal = MarginalSpec::two_point(1.0).expect("v > 0");
            let amp = move |a: f64| phi(&marginal, a).expect("|a| < 1 after clamping");
            let flow_cfg = match ctx2.flow_steady(cfg.tau) {
                Ok(c) => c,
                Err(e) => return CellOut::failure(seed, id, &e),
            };
            let traj = match integrate_flow(&sigma0, &sigma1, &amp, &w0, &flow_cfg) {
                Ok(t) => t,
                Err(e) => return CellOut::failure(seed, id, &e),
            };
            let w_train = run.trajectory.final_unit(0);
            let w_flow = traj.final_unit(0);
            let p_train = metrics::peak_index(&w_train).unwrap_or(0);
            let p_flow = metrics::peak_index(&w_flow).unwrap_or(0);
            let dist = metrics::circular_distance(p_train, p_flow, n);
            let mut out = CellOut::default();
            match MetricRow::measure(seed, id, -2.0, &w_train) {
                Ok(row) => out.rows.push(row),
                Err(e) => return CellOut::failure(seed, id, &e),
            }
            out.aux.push((
                "peaks".into(),
                vec![vec![
                    seed as f64,
                    p_train as f64,
                    p_flow as f64,
                    (dist == 0) as u8 as f64,
                    dist as f64,
                ]],
            ));
            out
        },
        |_, out| absorb(report, sink, out),
    )?;
    let _ = outs;
    // circular-distance histogram as the summary curve
    if let Some(table) = report.table("peaks") {
        let dist_col = table.col("circular_distance");
        let mut counts = vec![0.0; n / 2 + 1];
        for row in &table.rows {
            counts[row[dist_col] as usize] += 1.0;
        }
        report.curves.push(Series {
            label: "circular distance histogram".into(),
            points: counts.into_iter().enumerate().map(|(d, c)| (d as f64, c)).collect(),
            yerr: None,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// elliptical
// ---------------------------------------------------------------------------

fn run_elliptical(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let configs: Vec<(String, RadialLaw)> = vec![
        ("t40-nu3".into(), RadialLaw::StudentT { nu: 3.0 }),
        ("shell".into(), RadialLaw::Shell),
        ("custom-radial".into(), RadialLaw::CustomRadial),
    ];
    report.tables.push(AuxTable {
        name: "sinusoid_fits".into(),
        columns: vec![
            "config_index".into(),
            "seed".into(),
            "train_rel_residual".into(),
            "train_fit_k".into(),
            "flow_rel_residual".into(),
            "flow_fit_k".into(),
            "flow_constant".into(),
        ],
        rows: Vec::new(),
    });
    let mut cells = Vec::new();
    for (idx, (id, law)) in configs.iter().enumerate() {
        for &seed in &ctx.seeds {
            cells.push((idx, id.clone(), *law, seed));
        }
    }
    let ctx2 = ctx.clone();
    let outs = run_cells(
        cells,
        move |_, (idx, id, law, seed)| {
            let build = || -> Result<CellOut> {
                let cov0 = sqexp_covariance(n, 1.0, true)?;
                let cov1 = sqexp_covariance(n, 3.0, true)?;
                let model =
                    StimulusModel::elliptical(vec![*law, *law], vec![cov0.clone(), cov1.clone()])?;
                let cfg = ctx2.train_single(*seed)?;
                let run = train(&model, ArchPreset::SingleNeuron, &cfg)?;
                let w_train = run.trajectory.final_unit(0);
                let fit = metrics::sinusoid_fit(&w_train)?;
                // elliptical flow from the same init, with a Monte-Carlo
                // estimate of the radial constant
                let mut init_rng = crate::rng::root(*seed);
                let w0 =
                    init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)?
                        .w1
                        .row(0)
                        .to_vec();
                let mut c_rng = substream(*seed, config_hash(&["elliptical-c", id]));
                let c = elliptical_flow_constant(&model, 1, 4_000, &mut c_rng)?;
                let mut flow_cfg = ctx2.flow_steady(cfg.tau)?;
                flow_cfg.c_elliptical = c;
                let traj = integrate_elliptical_flow(&cov0, &cov1, c, &w0, &flow_cfg)?;
                let w_flow = traj.final_unit(0);
                let flow_fit = metrics::sinusoid_fit(&w_flow)?;
                let mut out = CellOut::default();
                out.rows.push(MetricRow::measure(*seed, id, f64::NAN, &w_train)?);
                out.aux.push((
                    "sinusoid_fits".into(),
                    vec![vec![
                        *idx as f64,
                        *seed as f64,
                        fit.rel_residual,
                        fit.k as f64,
                        flow_fit.rel_residual,
                        flow_fit.k as f64,
                        c,
                    ]],
                ));
                out.weights.push((id.clone(), w_train));
                Ok(out)
            };
            build().unwrap_or_else(|e| CellOut::failure(*seed, id, &e))
        },
        |_, out| absorb(report, sink, out),
    )?;
    stack_weights(report, &outs);
    Ok(())
}

// ---------------------------------------------------------------------------
// theory_vs_sim
// ---------------------------------------------------------------------------

fn theory_rows(n: usize) -> Result<Vec<(String, StimulusModel)>> {
    Ok(vec![
        ("ising".into(), StimulusModel::ising(n, &[0.3, 0.7])?),
        ("nlgp-g0.01".into(), StimulusModel::nlgp(n, 0.01, &[0.3, 0.7])?),
        ("kur-k5".into(), StimulusModel::kur(n, 5.0, &[1.0, 5.0])?),
    ])
}

fn run_theory_vs_sim(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    report.tables.push(AuxTable {
        name: "comparison".into(),
        columns: vec![
            "row".into(),
            "seed".into(),
            "sim_ipr".into(),
            "flow_ipr".into(),
            "peak_distance".into(),
            "c1".into(),
            "c3".into(),
        ],
        rows: Vec::new(),
    });
    let mut cells = Vec::new();
    for (idx, (id, model)) in theory_rows(n)?.into_iter().enumerate() {
        for &seed in &ctx.seeds {
            cells.push((idx, id.clone(), model.clone(), seed));
        }
    }
    let ctx2 = ctx.clone();
    let outs = run_cells(
        cells,
        move |_, (idx, id, model, seed)| {
            let build = || -> Result<CellOut> {
                let cfg = ctx2.train_single(*seed)?;
                let run = train(model, ArchPreset::SingleNeuron, &cfg)?;
                let w_train = run.trajectory.final_unit(0);
                // cubic amplifier surrogate from the class-1 marginal
                let marginal = match MarginalSpec::for_model(model, 1) {
                    Some(m) => m,
                    None => empirical_class_marginal(model, 1, 100_000, *seed)?,
                };
                let taylor = phi_taylor3(&marginal)?;
                let sigma0 = model.class_covariance(0)?;
                let sigma1 = model.class_covariance(1)?;
                let mut init_rng = crate::rng::root(*seed);
                let w0 =
                    init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)?
                        .w1
                        .row(0)
                        .to_vec();
                let amp = move |a: f64| taylor.eval(a);
                let flow_cfg = ctx2.flow_steady(cfg.tau)?;
                let traj = integrate_flow(&sigma0, &sigma1, &amp, &w0, &flow_cfg)?;
                let w_flow = traj.final_unit(0);
                ctx2.write_trajectory(&format!("theory_vs_sim_{id}_sim_seed{seed}"), &run.trajectory)?;
                ctx2.write_trajectory(&format!("theory_vs_sim_{id}_flow_seed{seed}"), &traj)?;

                let kurt = marginal.excess_kurtosis().unwrap_or(f64::NAN);
                let mut out = CellOut::default();
                out.rows.push(MetricRow::measure(*seed, &format!("{id}-sim"), kurt, &w_train)?);
                out.rows.push(MetricRow::measure(*seed, &format!("{id}-flow"), kurt, &w_flow)?);
                let sim_ipr = metrics::ipr(&w_train)?;
                let flow_ipr = metrics::ipr(&w_flow)?;
                let dist = metrics::circular_distance(
                    metrics::peak_index(&w_train)?,
                    metrics::peak_index(&w_flow)?,
                    n,
                );
                out.aux.push((
                    "comparison".into(),
                    vec![vec![
                        *idx as f64,
                        *seed as f64,
                        sim_ipr,
                        flow_ipr,
                        dist as f64,
                        taylor.c1,
                        taylor.c3,
                    ]],
                ));
                out.curves.push(Series {
                    label: format!("{id}-sim"),
                    points: w_train.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
                    yerr: None,
                });
                out.curves.push(Series {
                    label: format!("{id}-flow"),
                    points: w_flow.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
                    yerr: None,
                });
                Ok(out)
            };
            build().unwrap_or_else(|e| CellOut::failure(*seed, id, &e))
        },
        |_, out| absorb(report, sink, out),
    )?;
    let _ = outs;
    Ok(())
}

// ---------------------------------------------------------------------------
// scm / two_layer
// ---------------------------------------------------------------------------

fn run_units_experiment(
    ctx: &RunCtx,
    report: &mut ExperimentReport,
    sink: Sink,
    configs: Vec<(String, StimulusModel, ArchPreset)>,
) -> Result<()> {
    let kurt_coords = if ctx.full { 1_000_000 } else { 200_000 };
    let mut cells = Vec::new();
    for (id, model, preset) in configs {
        for &seed in &ctx.seeds {
            cells.push((id.clone(), model.clone(), preset, seed));
        }
    }
    let ctx2 = ctx.clone();
    let outs = run_cells(
        cells,
        move |_, (id, model, preset, seed)| {
            let build = || -> Result<CellOut> {
                let cfg = ctx2.train_multi(*seed)?;
                let run = train(model, *preset, &cfg)?;
                let kurt = measured_kurtosis(model, *seed, kurt_coords)?;
                let mut out = CellOut::default();
                for (unit, row) in run.trajectory.final_weights().rows().into_iter().enumerate() {
                    let w = row.to_vec();
                    out.rows.push(MetricRow::measure(*seed, id, kurt, &w)?);
                    out.weights.push((format!("{id}-u{unit}"), w));
                }
                Ok(out)
            };
            build().unwrap_or_else(|e| CellOut::failure(*seed, id, &e))
        },
        |_, out| absorb(report, sink, out),
    )?;
    stack_weights(report, &outs);
    Ok(())
}

fn run_scm(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let hidden = 10;
    let preset = ArchPreset::Scm { hidden, activation: Activation::Sigmoid };
    let configs = vec![
        ("scm-kur10".to_string(), StimulusModel::kur(n, 10.0, &[0.3, 0.7])?, preset),
        ("scm-kur4".to_string(), StimulusModel::kur(n, 4.0, &[0.3, 0.7])?, preset),
    ];
    run_units_experiment(ctx, report, sink, configs)
}

fn run_two_layer(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let hidden = 10;
    let configs = vec![
        (
            "two-layer-sigmoid-kur4".to_string(),
            StimulusModel::kur(n, 4.0, &[0.3, 0.7])?,
            ArchPreset::TwoLayer { hidden, activation: Activation::Sigmoid },
        ),
        (
            "two-layer-relu-kur30".to_string(),
            StimulusModel::kur(n, 30.0, &[0.3, 0.7])?,
            ArchPreset::TwoLayer { hidden, activation: Activation::Relu },
        ),
    ];
    run_units_experiment(ctx, report, sink, configs)
}

// ---------------------------------------------------------------------------
// breakdown
// ---------------------------------------------------------------------------

fn run_breakdown(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 100;
    report.tables.push(AuxTable {
        name: "divergence".into(),
        columns: vec![
            "gain".into(),
            "seed".into(),
            "time".into(),
            "ipr_sim".into(),
            "ipr_flow".into(),
            "l2_rel".into(),
        ],
        rows: Vec::new(),
    });
    let mut cells = Vec::new();
    for g in [100.0, 0.01] {
        for &seed in &ctx.seeds {
            cells.push((g, seed));
        }
    }
    let ctx2 = ctx.clone();
    let outs = run_cells(
        cells,
        move |_, &(g, seed)| {
            let id = format!("nlgp-g{g}");
            let build = || -> Result<CellOut> {
                let model = StimulusModel::nlgp(n, g, &[0.3, 0.7])?;
                let mut cfg = ctx2.train_single(seed)?;
                cfg.steps = if ctx2.full { 3_000 } else { 1_200 };
                cfg.snapshot_stride = 20;
                ctx2.apply_train_overrides(&mut cfg)?;
                let run = train(&model, ArchPreset::SingleNeuron, &cfg)?;

                let marginal = empirical_class_marginal(&model, 1, 100_000, seed)?;
                let table = AmplifierTable::tabulate(&marginal, 1_025, 1.0 - 1e-6)?;
                let sigma0 = model.class_covariance(0)?;
                let sigma1 = model.class_covariance(1)?;
                let mut init_rng = crate::rng::root(seed);
                let w0 =
                    init_params(1, n, cfg.init_variance, ArchPreset::SingleNeuron, &mut init_rng)?
                        .w1
                        .row(0)
                        .to_vec();
                let flow_cfg = FlowConfig {
                    dt: 1.0,
                    steps: cfg.steps,
                    tau: cfg.tau,
                    record_stride: cfg.snapshot_stride,
                    ..FlowConfig::with_tau(cfg.tau)
                };
                let amp = move |a: f64| table.eval(a);
                let traj = integrate_flow(&sigma0, &sigma1, &amp, &w0, &flow_cfg)?;
                ctx2.write_trajectory(&format!("breakdown_{id}_sim_seed{seed}"), &run.trajectory)?;
                ctx2.write_trajectory(&format!("breakdown_{id}_flow_seed{seed}"), &traj)?;

                // snapshots align: same stride on the same time axis
                let mut aux_rows = Vec::new();
                let mut ipr_curve = Vec::new();
                let mut l2_curve = Vec::new();
                for (k, t) in run.trajectory.times.iter().enumerate() {
                    let w_sim = run.trajectory.weights[k].row(0).to_vec();
                    let w_flow = traj.weights[k].row(0).to_vec();
                    let ipr_sim = metrics::ipr(&w_sim)?;
                    let ipr_flow = metrics::ipr(&w_flow)?;
                    let norm: f64 = w_sim.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let dist: f64 = w_sim
                        .iter()
                        .zip(&w_flow)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let l2_rel = dist / norm;
                    aux_rows.push(vec![g, seed as f64, *t, ipr_sim, ipr_flow, l2_rel]);
                    ipr_curve.push((*t, ipr_sim));
                    l2_curve.push((*t, l2_rel));
                }
                let w_final = run.trajectory.final_unit(0);
                let kurt = marginal.excess_kurtosis().unwrap_or(f64::NAN);
                let mut out = CellOut::default();
                out.rows.push(MetricRow::measure(seed, &id, kurt, &w_final)?);
                out.aux.push(("divergence".into(), aux_rows));
                out.curves.push(Series {
                    label: format!("{id}-ipr"),
                    points: ipr_curve,
                    yerr: None,
                });
                out.curves.push(Series {
                    label: format!("{id}-l2rel"),
                    points: l2_curve,
                    yerr: None,
                });
                Ok(out)
            };
            build().unwrap_or_else(|e| CellOut::failure(seed, &id, &e))
        },
        |_, out| absorb(report, sink, out),
    )?;
    let _ = outs;
    Ok(())
}

// ---------------------------------------------------------------------------
// ica_compare
// ---------------------------------------------------------------------------

fn run_ica_compare(ctx: &RunCtx, report: &mut ExperimentReport, sink: Sink) -> Result<()> {
    let n = 40;
    let components = 10;
    let ctx2 = ctx.clone();
    let batch_size = if ctx.full { 40_000 } else { 20_000 };
    let outs = run_cells(
        ctx.seeds.clone(),
        move |_, &seed| {
            let build = || -> Result<CellOut> {
                let model = StimulusModel::kur(n, 3.0, &[1.0, 3.0])?;
                let mut rng = substream(seed, config_hash(&["ica-batch"]));
                let batch = task_sample(&model, batch_size, &mut rng)?;
                let kurt =
                    metrics::excess_kurtosis(&batch.inputs.iter().copied().collect::<Vec<f64>>())?;
                let mut ica_rng = substream(seed, config_hash(&["ica-init"]));
                let mut res = crate::ica::fastica(&batch.inputs, components, 400, 1e-4, &mut ica_rng)?;
                crate::ica::canonicalize_components(&mut res.components);
                let mut out = CellOut::default();
                for (c, row) in res.components.rows().into_iter().enumerate() {
                    let w = row.to_vec();
                    out.rows.push(MetricRow::measure(seed, "ica-kur3", kurt, &w)?);
                    out.weights.push((format!("ica-{c}"), w));
                }
                // the single neuron on the same task, for the contrast
                let cfg = ctx2.train_single(seed)?;
                let run = train(&model, ArchPreset::SingleNeuron, &cfg)?;
                let w = run.trajectory.final_unit(0);
                out.rows.push(MetricRow::measure(seed, "single-neuron-kur3", kurt, &w)?);
                out.weights.push(("single-neuron".into(), w));
                Ok(out)
            };
            build().unwrap_or_else(|e| CellOut::failure(seed, "ica-kur3", &e))
        },
        |_, out| absorb(report, sink, out),
    )?;
    stack_weights(report, &outs);
    Ok(())
}
