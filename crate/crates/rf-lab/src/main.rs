//! Thin command-line front end over the library pipelines.
//!
//! Exit code 0 on success; failures print one machine-readable line
//! `error code=<kind> msg="..."` to stderr and exit nonzero. The worker
//! pool size is capped by the `RF_LAB_WORKERS` environment variable.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rf_lab::error::{Error, Result};
use rf_lab::flow::{
    integrate_elliptical_flow, integrate_flow, phi, phi_taylor3, FlowConfig, MarginalSpec,
};
use rf_lab::harness::{parse_config, ConfigDoc, ExperimentConfig};
use rf_lab::io::{
    batch_to_matrix, write_amplifier_csv, write_batch_csv, write_matrix_binary,
    write_trajectory_csv,
};
use rf_lab::nets::{train, Activation, ArchPreset, TrainConfig};
use rf_lab::rng::{root, substream};
use rf_lab::stimulus::{sqexp_covariance, task_sample, RadialLaw, StimulusModel};

#[derive(Parser)]
#[command(name = "rf-lab", version, about = "receptive-field localization laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a labelled stimulus batch and write it as CSV (or raw binary).
    Sample(SampleArgs),
    /// Train a network on the lengthscale task and dump the trajectory.
    Train(TrainArgs),
    /// Integrate the effective weight flow and dump the trajectory.
    Flow(FlowArgs),
    /// Tabulate the amplifier and its cubic surrogate as CSV.
    Phi(PhiArgs),
    /// Fit FastICA components on task data and dump them as CSV.
    Ica(IcaArgs),
    /// Run a registered experiment (use `--list` to see the registry).
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Family {
    Ising,
    Nlgp,
    Kur,
    Elliptical,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Radial {
    StudentT,
    Shell,
    CustomRadial,
}

#[derive(Args)]
struct StimulusArgs {
    /// Generator family.
    #[arg(long, value_enum)]
    family: Family,
    /// Input dimension.
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// NLGP gain.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Kur tail index.
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    /// Ising couplings per class.
    #[arg(long, default_value_t = 0.3)]
    j0: f64,
    #[arg(long, default_value_t = 0.7)]
    j1: f64,
    /// Latent lengthscales per class (NLGP, Kur, elliptical).
    #[arg(long, default_value_t = 1.0)]
    xi0: f64,
    #[arg(long, default_value_t = 3.0)]
    xi1: f64,
    /// Radial law for the elliptical family.
    #[arg(long, value_enum, default_value_t = Radial::StudentT)]
    radial: Radial,
    /// Student-t degrees of freedom.
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
}

impl StimulusArgs {
    fn apply_config(&mut self, doc: &ConfigDoc) -> Result<()> {
        if let Some(v) = doc.get_usize("stimulus", "n")? {
            self.n = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "g")? {
            self.g = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "k")? {
            self.k = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "j0")? {
            self.j0 = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "j1")? {
            self.j1 = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "xi0")? {
            self.xi0 = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "xi1")? {
            self.xi1 = v;
        }
        if let Some(v) = doc.get_f64("stimulus", "nu")? {
            self.nu = v;
        }
        Ok(())
    }

    fn model(&self) -> Result<StimulusModel> {
        match self.family {
            Family::Ising => StimulusModel::ising(self.n, &[self.j0, self.j1]),
            Family::Nlgp => StimulusModel::nlgp(self.n, self.g, &[self.xi0, self.xi1]),
            Family::Kur => StimulusModel::kur(self.n, self.k, &[self.xi0, self.xi1]),
            Family::Elliptical => {
                let law = match self.radial {
                    Radial::StudentT => RadialLaw::StudentT { nu: self.nu },
                    Radial::Shell => RadialLaw::Shell,
                    Radial::CustomRadial => RadialLaw::CustomRadial,
                };
                StimulusModel::elliptical(
                    vec![law, law],
                    vec![
                        sqexp_covariance(self.n, self.xi0, true)?,
                        sqexp_covariance(self.n, self.xi1, true)?,
                    ],
                )
            }
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    stimulus: StimulusArgs,
    #[arg(long, default_value_t = 1000)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (CSV by default).
    #[arg(long)]
    out: PathBuf,
    /// Write the little-endian f64 binary container instead of CSV.
    #[arg(long, default_value_t = false)]
    binary: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Arch {
    Single,
    Scm,
    TwoLayer,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    stimulus: StimulusArgs,
    #[arg(long, value_enum, default_value_t = Arch::Single)]
    arch: Arch,
    #[arg(long, default_value_t = 10)]
    hidden: usize,
    #[arg(long, value_enum, default_value_t = CliActivation::Relu)]
    activation: CliActivation,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    init_variance: Option<f64>,
    #[arg(long)]
    snapshot_stride: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CliActivation {
    Relu,
    Sigmoid,
}

impl From<CliActivation> for Activation {
    fn from(a: CliActivation) -> Self {
        match a {
            CliActivation::Relu => Activation::Relu,
            CliActivation::Sigmoid => Activation::Sigmoid,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AmplifierKind {
    /// Exact amplifier from the class-1 marginal.
    Phi,
    /// Cubic Taylor surrogate.
    Taylor,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    stimulus: StimulusArgs,
    #[arg(long, value_enum, default_value_t = AmplifierKind::Phi)]
    amplifier: AmplifierKind,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    record_stride: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    tau: f64,
    #[arg(long, default_value_t = 0.1)]
    init_variance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MarginalKind {
    TwoPoint,
    Gaussian,
    AlgSigmoid,
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long, value_enum)]
    marginal: MarginalKind,
    /// Two-point mass location.
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// Gaussian standard deviation.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Algebraic-sigmoid tail index.
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    /// Algebraic-sigmoid scale.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Number of tabulation points over (-a_max, a_max).
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[arg(long, default_value_t = 0.99)]
    a_max: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IcaArgs {
    #[command(flatten)]
    stimulus: StimulusArgs,
    #[arg(long, default_value_t = 10)]
    components: usize,
    #[arg(long, default_value_t = 20000)]
    batch: usize,
    #[arg(long, default_value_t = 400)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Registry id; omit with --list to enumerate.
    id: Option<String>,
    /// Comma-separated seed list (defaults to the entry's own list).
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Paper-scale budgets.
    #[arg(long, default_value_t = false)]
    full: bool,
    /// List registered experiments and exit.
    #[arg(long, default_value_t = false)]
    list: bool,
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigDoc> {
    match path {
        Some(p) => parse_config(&fs::read_to_string(p)?),
        None => Ok(ConfigDoc::default()),
    }
}

fn config_hash_for(doc: &ConfigDoc, tag: &str, seed: u64) -> u64 {
    rf_lab::harness::config_hash(&[tag, &seed.to_string(), &doc.canonical_text()])
}

fn cmd_sample(mut args: SampleArgs) -> Result<()> {
    let doc = load_config(&args.config)?;
    args.stimulus.apply_config(&doc)?;
    let model = args.stimulus.model()?;
    let mut rng = root(args.seed);
    let batch = task_sample(&model, args.batch, &mut rng)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    if args.binary {
        write_matrix_binary(&mut out, &batch_to_matrix(&batch))?;
    } else {
        write_batch_csv(&mut out, &batch, config_hash_for(&doc, &model.tag(), args.seed))?;
    }
    println!("wrote {} samples of dimension {} to {}", batch.len(), batch.n(), args.out.display());
    Ok(())
}

fn cmd_train(mut args: TrainArgs) -> Result<()> {
    let doc = load_config(&args.config)?;
    args.stimulus.apply_config(&doc)?;
    let model = args.stimulus.model()?;
    let preset = match args.arch {
        Arch::Single => ArchPreset::SingleNeuron,
        Arch::Scm => ArchPreset::Scm { hidden: args.hidden, activation: args.activation.into() },
        Arch::TwoLayer => {
            ArchPreset::TwoLayer { hidden: args.hidden, activation: args.activation.into() }
        }
    };
    let mut cfg = match preset {
        ArchPreset::SingleNeuron => TrainConfig::single_neuron(args.seed),
        _ => TrainConfig::multi_neuron(args.seed),
    };
    if let Some(v) = doc.get_f64("train", "tau")? {
        cfg.tau = v;
    }
    if let Some(v) = doc.get_usize("train", "steps")? {
        cfg.steps = v;
    }
    if let Some(v) = doc.get_usize("train", "batch_size")? {
        cfg.batch_size = v;
    }
    if let Some(v) = doc.get_f64("train", "init_variance")? {
        cfg.init_variance = v;
    }
    if let Some(v) = doc.get_usize("train", "snapshot_stride")? {
        cfg.snapshot_stride = v;
    }
    if let Some(v) = args.tau {
        cfg.tau = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = args.batch_size {
        cfg.batch_size = v;
    }
    if let Some(v) = args.init_variance {
        cfg.init_variance = v;
    }
    if let Some(v) = args.snapshot_stride {
        cfg.snapshot_stride = v;
    }
    let run = train(&model, preset, &cfg)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_trajectory_csv(&mut out, &run.trajectory, config_hash_for(&doc, &model.tag(), args.seed))?;
    let w = run.trajectory.final_unit(0);
    println!(
        "trained {} for {} steps: final loss {:.6}, unit-0 IPR {:.4}",
        preset.name(),
        cfg.steps,
        run.losses.last().copied().unwrap_or(f64::NAN),
        rf_lab::metrics::ipr(&w)?
    );
    println!("trajectory written to {}", args.out.display());
    Ok(())
}

fn cmd_flow(mut args: FlowArgs) -> Result<()> {
    let doc = load_config(&args.config)?;
    args.stimulus.apply_config(&doc)?;
    let model = args.stimulus.model()?;
    let n = model.n();
    let mut cfg = FlowConfig {
        dt: 1.0,
        steps: 20_000,
        tau: args.tau,
        record_stride: 1_000,
        ..FlowConfig::with_tau(args.tau)
    };
    if let Some(v) = doc.get_f64("flow", "dt")? {
        cfg.dt = v;
    }
    if let Some(v) = doc.get_usize("flow", "steps")? {
        cfg.steps = v;
    }
    if let Some(v) = doc.get_usize("flow", "record_stride")? {
        cfg.record_stride = v;
    }
    if let Some(v) = doc.get_f64("flow", "c")? {
        cfg.c_elliptical = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = args.record_stride {
        cfg.record_stride = v;
    }
    let mut init_rng = root(args.seed);
    let w0 = rf_lab::nets::init_params(
        1,
        n,
        args.init_variance,
        ArchPreset::SingleNeuron,
        &mut init_rng,
    )?
    .w1
    .row(0)
    .to_vec();
    let sigma0 = model.class_covariance(0)?;
    let sigma1 = model.class_covariance(1)?;
    let traj = if matches!(model, StimulusModel::Elliptical { .. }) {
        let mut c_rng = substream(args.seed, 0x0e11);
        let c = rf_lab::flow::elliptical_flow_constant(&model, 1, 4_000, &mut c_rng)?;
        integrate_elliptical_flow(&sigma0, &sigma1, c, &w0, &cfg)?
    } else {
        match args.amplifier {
            AmplifierKind::Phi => {
                let marginal = match MarginalSpec::for_model(&model, 1) {
                    Some(m) => m,
                    None => {
                        let mut rng = substream(args.seed, 0x3a12);
                        let rows = 100_000usize.div_ceil(n);
                        let x = model.sample_class(1, rows, &mut rng)?;
                        MarginalSpec::empirical(&x.iter().copied().collect::<Vec<f64>>())?
                    }
                };
                let amp = move |a: f64| phi(&marginal, a).expect("clamped argument");
                integrate_flow(&sigma0, &sigma1, &amp, &w0, &cfg)?
            }
            AmplifierKind::Taylor => {
                let marginal = MarginalSpec::for_model(&model, 1).ok_or_else(|| {
                    Error::InvalidParameter(
                        "no closed-form marginal for this family; use --amplifier phi".into(),
                    )
                })?;
                let t = phi_taylor3(&marginal)?;
                let amp = move |a: f64| t.eval(a);
                integrate_flow(&sigma0, &sigma1, &amp, &w0, &cfg)?
            }
        }
    };
    let w = traj.final_unit(0);
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_trajectory_csv(&mut out, &traj, config_hash_for(&doc, &model.tag(), args.seed))?;
    println!(
        "integrated {} steps: final IPR {:.4}, peak {}",
        cfg.steps,
        rf_lab::metrics::ipr(&w)?,
        rf_lab::metrics::peak_index(&w)?
    );
    println!("trajectory written to {}", args.out.display());
    Ok(())
}

fn cmd_phi(args: PhiArgs) -> Result<()> {
    let marginal = match args.marginal {
        MarginalKind::TwoPoint => MarginalSpec::two_point(args.v)?,
        MarginalKind::Gaussian => MarginalSpec::gaussian(args.sigma)?,
        MarginalKind::AlgSigmoid => MarginalSpec::alg_sigmoid(args.k, args.scale)?,
    };
    if args.points < 2 || !(args.a_max > 0.0 && args.a_max < 1.0) {
        return Err(Error::InvalidParameter("need points >= 2 and a_max in (0,1)".into()));
    }
    let taylor = phi_taylor3(&marginal).ok();
    let mut rows = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let a = -args.a_max + 2.0 * args.a_max * i as f64 / (args.points - 1) as f64;
        let p = phi(&marginal, a)?;
        let t = taylor.as_ref().map(|t| t.eval(a)).unwrap_or(f64::NAN);
        rows.push((a, p, t));
    }
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_amplifier_csv(&mut out, &rows, rf_lab::harness::config_hash(&[&format!("{:?}", args.marginal as u8)]))?;
    println!("tabulated {} amplifier points to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_ica(mut args: IcaArgs) -> Result<()> {
    let doc = load_config(&args.config)?;
    args.stimulus.apply_config(&doc)?;
    let mut components = args.components;
    let mut max_iter = args.max_iter;
    let mut tol = args.tol;
    if let Some(v) = doc.get_usize("ica", "components")? {
        components = v;
    }
    if let Some(v) = doc.get_usize("ica", "max_iter")? {
        max_iter = v;
    }
    if let Some(v) = doc.get_f64("ica", "tol")? {
        tol = v;
    }
    let model = args.stimulus.model()?;
    let mut rng = root(args.seed);
    let batch = task_sample(&model, args.batch, &mut rng)?;
    let mut res = rf_lab::ica::fastica(&batch.inputs, components, max_iter, tol, &mut rng)?;
    rf_lab::ica::canonicalize_components(&mut res.components);
    // components exported in the trajectory schema, one unit per row
    let mut traj = rf_lab::trajectory::WeightTrajectory::new(Default::default());
    traj.push(1.0, res.components.clone());
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_trajectory_csv(&mut out, &traj, config_hash_for(&doc, &model.tag(), args.seed))?;
    let localized = res
        .components
        .rows()
        .into_iter()
        .filter(|r| rf_lab::metrics::ipr(&r.to_vec()).map(|v| v >= 0.3).unwrap_or(false))
        .count();
    println!(
        "fastica: {} components ({} localized at IPR >= 0.3), converged = {}, {} iterations",
        components, localized, res.converged, res.n_iter
    );
    println!("components written to {}", args.out.display());
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    if args.list {
        for def in rf_lab::harness::registry() {
            println!("{:18} {}", def.id, def.description);
        }
        return Ok(());
    }
    let id = args
        .id
        .ok_or_else(|| Error::InvalidParameter("missing experiment id (or --list)".into()))?;
    let overrides = load_config(&args.config)?;
    let mut cfg = ExperimentConfig::new(&id);
    cfg.seeds = args.seed;
    if let Some(seeds) = overrides.get_u64_list("experiment", "seeds")? {
        if cfg.seeds.is_empty() {
            cfg.seeds = seeds;
        }
    }
    cfg.full = args.full || overrides.get_bool("experiment", "full")?.unwrap_or(false);
    cfg.out_dir = args
        .out
        .or_else(|| overrides.get("experiment", "out").map(PathBuf::from))
        .or_else(|| Some(PathBuf::from("out").join(&id)));
    cfg.overrides = overrides;
    let report = rf_lab::harness::run_experiment(&cfg)?;
    println!(
        "experiment {} (config {:016x}): {} metric rows, {} failures",
        report.id,
        report.config_hash,
        report.rows.len(),
        report.failures.len()
    );
    for agg in &report.aggregates {
        println!(
            "  {:24} n={:3} mean IPR {:.4} +- {:.4} (excess kurtosis {:+.3})",
            agg.config_id, agg.count, agg.mean_ipr, agg.std_ipr, agg.mean_excess_kurtosis
        );
    }
    if let Some(dir) = &cfg.out_dir {
        println!("artifacts in {}", dir.display());
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Sample(args) => cmd_sample(args),
        Command::Train(args) => cmd_train(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Phi(args) => cmd_phi(args),
        Command::Ica(args) => cmd_ica(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error code={} msg={:?}", e.code(), e.to_string());
            ExitCode::FAILURE
        }
    }
}
