use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hos_recover::alignment::bispectrum_relative_error;
use hos_recover::analytic::{consumed_indices, recursive_recover, unit_modulus_signal, PhaseRecoveryInput};
use hos_recover::experiments::{
    default_length, emit_outputs, parse_k_list, run_sweep, Experiment, ExperimentSpec, SweepFile, DEFAULT_TRIALS,
};
use hos_recover::rank::{RankProbe, DEFAULT_RANK_TOL};
use hos_recover::seeding::rng_from_seed;
use hos_recover::sensing::MeasurementOperator;
use hos_recover::spectra::SpectrumMap;
use hos_recover::{HosError, Result};

#[derive(Parser)]
#[command(name = "hos-recover", version, about = "Signal recovery from linear measurements of high-order spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success rate of recovery as a function of the number of measurements K.
    Sweep(SweepArgs),
    /// Numerical rank of the compressed spectrum Jacobian at random points.
    RankProbe(RankArgs),
    /// Closed-form recursive recovery of a unit-modulus signal.
    AnalyticDemo(DemoArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML or JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// random | spectra-rows | samples
    #[arg(long)]
    experiment: Option<Experiment>,
    #[arg(long)]
    q: Option<usize>,
    /// Signal length (default 30 for q = 3, 10 for q = 4).
    #[arg(long = "N")]
    n: Option<usize>,
    /// Comma list and/or inclusive ranges start:stop[:step].
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random starts per solve.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Run trials one at a time instead of on the thread pool.
    #[arg(long)]
    serial: bool,
    #[arg(long, env = "HOS_RECOVER_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Rows of the Gaussian operator (default N + 1).
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rel_tol: f64,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long = "N", default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn sweep(args: SweepArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => SweepFile::load(path)?,
        None => SweepFile::default(),
    };
    let experiment = args
        .experiment
        .or(file.experiment)
        .ok_or_else(|| HosError::InvalidConfig("--experiment is required".into()))?;
    let q = args.q.or(file.q).unwrap_or(3);
    let n = args.n.or(file.n).unwrap_or_else(|| default_length(q));
    let ks = match (&args.k, &file.k) {
        (Some(text), _) => parse_k_list(text)?,
        (None, Some(k)) => k.resolve()?,
        (None, None) => return Err(HosError::InvalidConfig("--K is required".into())),
    };
    let mut spec = ExperimentSpec { n, ..ExperimentSpec::new(experiment, q, ks) };
    spec.trials = args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    spec.base_seed = args.seed.or(file.seed).unwrap_or(0);
    if let Some(starts) = args.starts.or(file.starts) {
        spec.solver.num_starts = starts;
    }
    if let Some(max_iters) = args.max_iters.or(file.max_iters) {
        spec.solver.max_iters = max_iters;
    }
    if let Some(threshold) = args.threshold.or(file.threshold) {
        spec.threshold = threshold;
    }
    spec.parallel = !(args.serial || file.serial.unwrap_or(false));
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("results"));

    let result = run_sweep(&spec)?;
    println!("{} q={} N={} trials={} seed={}", spec.experiment, spec.q, spec.n, spec.trials, spec.base_seed);
    println!("{:>6}  {:>9}  {:>6}", "K", "successes", "rate");
    for p in &result.table {
        println!("{:>6}  {:>4}/{:<4}  {:>6.3}", p.k, p.successes, p.trials, p.rate);
    }
    let paths = emit_outputs(&spec, &result, &out)?;
    println!("wrote {}, {}, {}", paths.csv.display(), paths.json.display(), paths.svg.display());
    Ok(())
}

fn rank_probe(args: RankArgs) -> Result<()> {
    let k = args.k.unwrap_or(args.n + 1);
    let probe = RankProbe { rel_tol: args.rel_tol, ..RankProbe::new(args.n, args.q, k, args.trials, args.seed) };
    let report = probe.run()?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| HosError::InvalidConfig(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn analytic_demo(args: DemoArgs) -> Result<()> {
    let mut rng = rng_from_seed(args.seed);
    let dc = 1.0 + args.n as f64 * 0.1;
    let x = unit_modulus_signal(args.n, dc, &mut rng)?;
    let map = SpectrumMap::new(args.n, args.q)?;
    let m = map.spectrum(&x);
    // The consumed entries are exactly a sampling-mask measurement.
    let mask = MeasurementOperator::sampling_mask(consumed_indices(args.n, args.q)?, args.n, args.q)?;
    let y = mask.apply(&m)?;
    let input = PhaseRecoveryInput { n: args.n, q: args.q, dc, entries: y.values };
    let estimate = recursive_recover(&input)?;
    let err = bispectrum_relative_error(&estimate.real_values(), &x.real_values())?;
    println!("N = {}, q = {}: {} spectrum entries of {} plus the mean", args.n, args.q, input.entries.len(), map.len());
    println!("aligned relative error {err:.3e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::RankProbe(args) => rank_probe(args),
        Command::AnalyticDemo(args) => analytic_demo(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
