use std::path::PathBuf;
use std::process::ExitCode;

use aces::experiment::{configure_threads, run_stage, ExperimentConfig, RunOptions, Stage};
use clap::Parser;

/// Averaged circuit eigenvalue sampling: simulate and fit Pauli noise.
#[derive(Debug, Parser)]
#[command(name = "aces", version)]
struct Args {
    /// Experiment config (TOML). Desk-scale defaults with seed 1 when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// generate | design | simulate | solve | report | all
    #[arg(long, default_value = "all")]
    stage: Stage,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per batch; repeat for several runs. Overrides the config.
    #[arg(long)]
    shots: Vec<u64>,
    /// Solve this estimates CSV instead of the simulated ones.
    #[arg(long)]
    estimates: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), aces::experiment::ExperimentError> {
    configure_threads()?;
    let mut config = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::with_seed(1),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if !args.shots.is_empty() {
        config.shots = args.shots.clone();
    }
    config.validate()?;
    let out = args.out.or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("aces-out"));
    let options = RunOptions { out_dir: out, estimates: args.estimates };
    if let Some(summary) = run_stage(&config, args.stage, &options)? {
        println!(
            "N = {}, M = {}, rank = {}, gates = {}",
            summary.parameters, summary.rows, summary.rank, summary.modeled_gates
        );
        for r in &summary.runs {
            let tvd = r.tvd.map(|t| format!("TVD median {:.3e} p95 {:.3e}", t.median, t.p95)).unwrap_or_default();
            let samples = r.sample_count.map(|s| format!("samples {s}")).unwrap_or_default();
            println!("{}: {samples} {tvd}", r.label);
        }
    }
    eprintln!("{} done, artifacts in {}", args.stage, options.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
