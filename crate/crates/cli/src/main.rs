#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "pdmp",
    version,
    about = "Distribution functions of piecewise-deterministic Markov processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the CFL bound for the configured model and grid.
    Cfl(Args),
    /// Run the upwind solver, write snapshot CSVs and run the checks.
    Solve(Args),
    /// Run the Monte Carlo ensemble and write its endpoints.
    Simulate(Args),
    /// Run both and report the KS distance at each snapshot.
    Compare(Args),
    /// Measure the observed order of convergence.
    Convergence(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (Command::Cfl(args)
    | Command::Solve(args)
    | Command::Simulate(args)
    | Command::Compare(args)
    | Command::Convergence(args)) = &cli.command;
    let resolved = config::load_config(&args.config)?;
    let out = commands::output_for(&resolved, args.out.as_deref());
    match cli.command {
        Command::Cfl(_) => commands::cfl(&resolved),
        Command::Solve(_) => commands::solve_cmd(&resolved, &out),
        Command::Simulate(_) => commands::simulate(&resolved, &out),
        Command::Compare(_) => commands::compare(&resolved, &out),
        Command::Convergence(_) => commands::convergence(&resolved, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
