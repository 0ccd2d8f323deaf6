use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eos_core::harness::{ExperimentKind, GridSpec, LossGrid, SweepConfig, SweepResult};
use eos_core::mean_model::{mm_run, threshold_eta, MeanModelConfig, MmStopRule};
use eos_core::numerics::sym_eig_max;
use eos_core::relu_net::{
    compare_to_mean_model, generate_dataset, init_params, iterations_for_budget, train_with, TrainOptions,
};
use eos_core::single_neuron::{classify_regime, hessian, limiting_sharpness, run, Record, StopRule};
use eos_core::{run_experiment, Error, LossSpec};
use serde_json::json;

/// Gradient descent at the edge of stability: simulations and sweeps.
#[derive(Parser)]
#[command(name = "eos", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// GD on f(x, y) = ℓ(xy).
    #[command(subcommand)]
    SingleNeuron(SingleNeuronCmd),
    /// The reduced (A, b) dynamics.
    #[command(subcommand)]
    MeanModel(MeanModelCmd),
    /// Two-layer ReLU network on sparse-coding data.
    #[command(subcommand)]
    Relu(ReluCmd),
    /// Run a sweep described by a JSON config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SweepOutput {
    /// CSV output path; the summary goes to <out>.summary.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Also write <out>.plot.py.
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "EOS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum SingleNeuronCmd {
    /// One trajectory, written row by row.
    Run {
        #[arg(long, default_value = "sqrt")]
        loss: LossSpec,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long, default_value_t = 100_000_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol_x: f64,
        /// Keep every k-th iterate (1 keeps all).
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sharpness-gap or bounce-count scaling over an η grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Gap)]
        kind: SweepKind,
        /// Repeatable; defaults to the experiment's exponent set.
        #[arg(long)]
        loss: Vec<LossSpec>,
        /// For example log:1e-4:0.1353:20.
        #[arg(long)]
        eta_grid: Option<GridSpec>,
        /// Use the built-in per-loss grids for the scaling fits.
        #[arg(long, conflicts_with_all = ["loss", "eta_grid"])]
        preset: bool,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        max_iters: Option<usize>,
        #[command(flatten)]
        output: SweepOutput,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Gap,
    Bounce,
}

#[derive(Subcommand)]
enum MeanModelCmd {
    /// One trajectory from A0 and b = 0.
    Run {
        #[arg(long, default_value_t = 200)]
        d: usize,
        /// Step size in units of 8π/d².
        #[arg(long, conflicts_with = "eta")]
        eta_ratio: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        /// Defaults to d(a⁻ + a⁺) drawn from the seed.
        #[arg(long, allow_hyphen_values = true)]
        a0: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Limiting bias across η/(8π/d²) for several initialisations.
    Sweep {
        #[arg(long, default_value_t = 200)]
        d: usize,
        /// Grid of η/(8π/d²).
        #[arg(long, default_value = "lin:0.8:1.4:61")]
        grid: GridSpec,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, allow_hyphen_values = true)]
        a0: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: SweepOutput,
    },
}

#[derive(Args)]
struct ReluData {
    #[arg(long, default_value_t = 200)]
    d: usize,
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 3.0)]
    lambda: f64,
    #[arg(long, default_value_t = 10.0)]
    time_budget: f64,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Subcommand)]
enum ReluCmd {
    /// Full-batch GD, one row per iterate.
    Train {
        #[command(flatten)]
        data: ReluData,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Final state across step sizes.
    SweepEta {
        #[command(flatten)]
        data: ReluData,
        #[arg(long)]
        eta_grid: GridSpec,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[command(flatten)]
        output: SweepOutput,
    },
    /// Network against the mean model from the same initialisation.
    CompareMm {
        #[command(flatten)]
        data: ReluData,
        #[arg(long, default_value_t = 2.5e-3)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Replaces `out_path` from the file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    emit_plot_script: bool,
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for failed checks, so usage errors map to 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every check passed.
fn dispatch(cmd: Command) -> eos_core::Result<bool> {
    match cmd {
        Command::SingleNeuron(c) => single_neuron(c),
        Command::MeanModel(c) => mean_model(c),
        Command::Relu(c) => relu(c),
        Command::Experiment(a) => {
            let mut cfg = SweepConfig::from_json_file(&a.config)?;
            if let Some(seed) = env_seed()? {
                cfg.seed = seed;
            }
            if let Some(out) = a.out {
                cfg.out_path = out;
            }
            if let Some(p) = a.parallelism {
                cfg.parallelism = p;
            }
            cfg.emit_plot_script |= a.emit_plot_script;
            sweep(cfg)
        }
    }
}

fn env_seed() -> eos_core::Result<Option<u64>> {
    match std::env::var("EOS_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::InvalidInput(format!("EOS_SEED={v:?} is not a u64"))),
        Err(_) => Ok(None),
    }
}

fn apply_output(cfg: &mut SweepConfig, out: SweepOutput) {
    cfg.out_path = out.out;
    cfg.parallelism = out.parallelism;
    cfg.emit_plot_script = out.emit_plot_script;
}

fn sweep(cfg: SweepConfig) -> eos_core::Result<bool> {
    let res = run_experiment(&cfg)?;
    report(&res);
    Ok(res.all_passed())
}

fn report(res: &SweepResult) {
    for c in &res.checks {
        println!("{} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {} and {}", res.csv_path.display(), res.summary_path.display());
    if let Some(p) = &res.plot_path {
        println!("wrote {}", p.display());
    }
}

fn csv_writer(path: &Path) -> eos_core::Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn f(v: f64) -> String {
    format!("{v:e}")
}

fn single_neuron(cmd: SingleNeuronCmd) -> eos_core::Result<bool> {
    match cmd {
        SingleNeuronCmd::Run { loss, eta, x0, y0, max_iters, tol_x, record_every, out } => {
            let regime = classify_regime(x0, y0, eta)?;
            let record = if record_every <= 1 { Record::All } else { Record::Every(record_every) };
            let stop = StopRule { max_iters, tol_x, record, ..StopRule::default() };
            let traj = run(x0, y0, &loss, eta, stop)?;
            let mut w = csv_writer(&out)?;
            w.write_record(["t", "x", "y", "s", "r", "d", "rho", "sharpness", "phase"])?;
            for k in 0..traj.states.len() {
                let (s, dg) = (traj.states[k], traj.diags[k]);
                let sharp = hessian(s, &loss).and_then(|h| sym_eig_max(&h)).map_or_else(|_| String::new(), f);
                w.write_record([
                    traj.iters[k].to_string(),
                    f(s.x),
                    f(s.y),
                    f(dg.s),
                    f(dg.r),
                    f(dg.d),
                    f(dg.rho),
                    sharp,
                    traj.phase_tags[k].as_str().to_string(),
                ])?;
            }
            w.flush()?;
            let summary = json!({
                "regime": format!("{regime:?}"),
                "outcome": format!("{:?}", traj.outcome),
                "iterations": traj.final_iter,
                "crossing_iter": traj.crossing_iter,
                "limiting_sharpness": limiting_sharpness(&traj).ok(),
                "two_over_eta": 2.0 / eta,
            });
            println!("{summary}");
            traj.status()?;
            Ok(true)
        }
        SingleNeuronCmd::Sweep { kind, loss, eta_grid, preset, delta, max_iters, output } => {
            let experiment = match kind {
                SweepKind::Gap => ExperimentKind::SingleNeuronGapScaling,
                SweepKind::Bounce => ExperimentKind::SingleNeuronBounceCount,
            };
            let mut cfg = if preset {
                SweepConfig::scaling_preset(experiment, &output.out)
            } else {
                let grid =
                    eta_grid.ok_or_else(|| Error::InvalidInput("--eta-grid is required without --preset".into()))?;
                let mut cfg = SweepConfig::new(experiment, grid, &output.out);
                cfg.params.losses = loss.into_iter().map(LossGrid::new).collect();
                cfg
            };
            cfg.params.delta = delta;
            if let Some(m) = max_iters {
                cfg.params.max_iters = m;
            }
            apply_output(&mut cfg, output);
            sweep(cfg)
        }
    }
}

fn mean_model(cmd: MeanModelCmd) -> eos_core::Result<bool> {
    match cmd {
        MeanModelCmd::Run { d, eta_ratio, eta, a0, seed, out } => {
            let eta = match (eta, eta_ratio) {
                (Some(e), _) => e,
                (None, Some(r)) => r * threshold_eta(d),
                (None, None) => return Err(Error::InvalidInput("give --eta or --eta-ratio".into())),
            };
            let a0 = a0.unwrap_or_else(|| eos_core::harness::mean_model_a0(d, seed.seed));
            let traj = mm_run(&MeanModelConfig::new(d, eta, a0), MmStopRule::default())?;
            let mut w = csv_writer(&out)?;
            w.write_record(["t", "A", "b", "sharpness_proxy"])?;
            for k in 0..traj.states.len() {
                let s = traj.states[k];
                w.write_record([traj.iters[k].to_string(), f(s.a), f(s.b), f(traj.sharp_proxy[k])])?;
            }
            w.flush()?;
            println!(
                "{}",
                json!({
                    "eta": eta,
                    "eta_over_threshold": eta / threshold_eta(d),
                    "a0": a0,
                    "b_inf": traj.b_inf,
                    "outcome": format!("{:?}", traj.outcome),
                    "iterations": traj.final_iter,
                    "max_sign_alternations": traj.max_sign_alternations,
                })
            );
            traj.status()?;
            Ok(true)
        }
        MeanModelCmd::Sweep { d, grid, seeds, a0, seed, output } => {
            let mut cfg = SweepConfig::new(ExperimentKind::MeanModelPhase, grid, &output.out);
            cfg.seed = seed.seed;
            cfg.params.d = d;
            cfg.params.seeds = seeds;
            cfg.params.a0 = a0;
            apply_output(&mut cfg, output);
            sweep(cfg)
        }
    }
}

fn relu_config(
    kind: ExperimentKind,
    grid: GridSpec,
    data: &ReluData,
    seeds: usize,
    output: SweepOutput,
) -> SweepConfig {
    let mut cfg = SweepConfig::new(kind, grid, &output.out);
    cfg.seed = data.seed.seed;
    cfg.params.d = data.d;
    cfg.params.n = data.n;
    cfg.params.lambda = data.lambda;
    cfg.params.time_budget = data.time_budget;
    cfg.params.seeds = seeds;
    apply_output(&mut cfg, output);
    cfg
}

fn relu(cmd: ReluCmd) -> eos_core::Result<bool> {
    match cmd {
        ReluCmd::Train { data, eta, out } => {
            let ds = generate_dataset(data.d, data.n, data.lambda, data.seed.seed)?;
            let iters = iterations_for_budget(eta, data.time_budget);
            let traj = train_with(&ds, init_params(data.d, data.seed.seed), eta, iters, TrainOptions::default())?;
            let mut w = csv_writer(&out)?;
            w.write_record(["t", "a_minus", "a_plus", "A", "b", "loss", "sharpness", "test_acc"])?;
            for r in &traj.records {
                w.write_record([
                    r.t.to_string(),
                    f(r.a_minus),
                    f(r.a_plus),
                    f(r.a_sum),
                    f(r.b),
                    f(r.loss),
                    f(r.sharpness),
                    f(r.test_acc),
                ])?;
            }
            w.flush()?;
            let last = traj.records.last().expect("training records the final iterate");
            println!(
                "{}",
                json!({
                    "iterations": iters,
                    "b_final": last.b,
                    "A_final": last.a_sum,
                    "test_acc": last.test_acc,
                    "sign_flips": traj.sign_flips,
                    "max_sign_alternations": traj.max_sign_alternations,
                })
            );
            Ok(true)
        }
        ReluCmd::SweepEta { data, eta_grid, seeds, output } => {
            sweep(relu_config(ExperimentKind::ReluPhase, eta_grid, &data, seeds, output))
        }
        ReluCmd::CompareMm { data, eta, out } => {
            let ds = generate_dataset(data.d, data.n, data.lambda, data.seed.seed)?;
            let iters = iterations_for_budget(eta, data.time_budget);
            let report = compare_to_mean_model(&ds, init_params(data.d, data.seed.seed), eta, iters)?;
            let mut w = csv_writer(&out)?;
            w.write_record(["t", "b_network", "b_mean_model", "A_network", "A_mean_model"])?;
            for r in &report.rows {
                w.write_record([
                    r.t.to_string(),
                    f(r.b_network),
                    f(r.b_mean_model),
                    f(r.a_network),
                    f(r.a_mean_model),
                ])?;
            }
            w.flush()?;
            println!(
                "{}",
                json!({
                    "t_init": report.t_init,
                    "max_b_deviation": report.max_b_deviation,
                    "max_a_deviation": report.max_a_deviation,
                })
            );
            Ok(true)
        }
    }
}
