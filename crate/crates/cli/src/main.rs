use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tensor_growth_cli::commands::{cmd_check, cmd_fit, cmd_gauss, cmd_growth};
use tensor_growth_cli::config::{Experiment, Overrides};

/// Tensor power decomposition and growth-exponent experiments.
#[derive(Parser)]
#[command(name = "tgrowth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute b_n for n = 1..n_max and write series.csv.
    Growth(Common),
    /// Fit log(b_n / dim^n) against log n and write fit.json.
    Fit(Common),
    /// Run the invariant suite on small powers and write check.json.
    Check(Common),
    /// Compare exact and Gaussian estimates; write compare.csv and moments.json.
    Gauss(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cartan type, e.g. A2xT1.
    #[arg(long)]
    group: Option<String>,
    /// Summands as `1,0:2/0,1` (coordinates, optional `:multiplicity`).
    #[arg(long)]
    rep: Option<String>,
    #[arg(long = "nmax")]
    n_max: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&Experiment) -> _) = match &cli.command {
        Command::Growth(c) => (c, cmd_growth),
        Command::Fit(c) => (c, cmd_fit),
        Command::Check(c) => (c, cmd_check),
        Command::Gauss(c) => (c, cmd_gauss),
    };
    let overrides = Overrides {
        group: common.group.clone(),
        rep: common.rep.clone(),
        n_max: common.n_max,
    };
    let result = Experiment::load(common.config.as_deref(), common.out.as_deref(), &overrides).and_then(|exp| run(&exp));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tgrowth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
