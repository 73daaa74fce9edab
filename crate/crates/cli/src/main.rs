use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polebridge::config::{parse_config_for, Check};
use polebridge::exec::with_jobs;
use polebridge::report::Format;
use polebridge::run::{exit_code, run_experiment, status_json};
use polebridge::{Error, Result};

/// Simulate Riemannian Brownian bridges to a pole and verify the
/// integration-by-parts formula on path space.
#[derive(Parser, Debug)]
#[command(name = "polebridge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integration-by-parts identity for (F, G, h) combinations.
    Ibp(RunArgs),
    /// Bridge law as a reweighting of free Brownian motion.
    Girsanov(RunArgs),
    /// Bridge radial moments against the Bessel-bridge oracle.
    Radial(RunArgs),
    /// Decay of the boundary pairing as t → 1.
    Decay(RunArgs),
    /// Deterministic kernel and curvature identities.
    Identities(RunArgs),
    /// Agreement of the two divergence representations under refinement.
    Equiv(RunArgs),
    /// Dump simulated paths as CSV.
    Simulate(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(short, long)]
    config: PathBuf,
    /// Override simulation.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override simulation.paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Directory for `<check>.json` and `<check>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "POLEBRIDGE_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

impl Command {
    fn split(self) -> (Check, RunArgs) {
        match self {
            Command::Ibp(a) => (Check::Ibp, a),
            Command::Girsanov(a) => (Check::Girsanov, a),
            Command::Radial(a) => (Check::Radial, a),
            Command::Decay(a) => (Check::Decay, a),
            Command::Identities(a) => (Check::Identities, a),
            Command::Equiv(a) => (Check::Equiv, a),
            Command::Simulate(a) => (Check::Simulate, a),
        }
    }
}

fn run(check: Check, args: RunArgs) -> Result<polebridge::run::RunOutcome> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", args.config.display())]))?;
    let config = parse_config_for(&text, Some(check))?.with_overrides(args.seed, args.paths, args.out)?;
    let outcome = with_jobs(args.jobs.map(|j| j as usize), || run_experiment(&config))?;
    if config.output.json.is_none() {
        print!("{}", outcome.summary.render(Format::Json));
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (check, args) = cli.command.split();
    let result = run(check, args);
    if let Err(e) = &result {
        eprintln!("polebridge {check}: {e}");
    }
    eprint!("{}", status_json(check, &result));
    ExitCode::from(exit_code(&result) as u8)
}
