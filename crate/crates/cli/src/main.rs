use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cnstn_cli::{execute, Command, Options};

#[derive(Parser)]
#[command(name = "cnstn", version, about = "Spectral Galerkin experiments for noisy compressible Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the scheme and write the ledger, trajectory and final checkpoint.
    Simulate(Args),
    /// Solve one Brownian sample at successive dyadic interpolation levels.
    Wongzakai(Args),
    /// Lift, driver norms and remainder scaling exponent.
    Roughcheck(Args),
    /// Brownian ensemble with the Ito-Stratonovich checks.
    Strat(Args),
    /// Run the scheme with every offline audit.
    Audit(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run out-of-scope noise with expected-fail annotations.
    #[arg(long)]
    informative: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Wongzakai(a) => (Command::Wongzakai, a),
        Sub::Roughcheck(a) => (Command::Roughcheck, a),
        Sub::Strat(a) => (Command::Strat, a),
        Sub::Audit(a) => (Command::Audit, a),
    };
    let options = Options { config: args.config, out: args.out, seed: args.seed, informative: args.informative };
    ExitCode::from(execute(command, &options).code() as u8)
}
