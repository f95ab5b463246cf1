//! `zinfer`: evidence inference from posterior samples.
//!
//! Exit codes: 0 success, 2 usage/input error, 3 numerical/pipeline failure.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zinfer::Error;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "zinfer", version, about = "Infer Bayesian evidence from posterior samples")]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker-thread cap (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer p(log Z) from a posterior-sample CSV
    /// (parameter columns + `log_likelihood` + `log_prior`).
    Infer { input: PathBuf },
    /// Run a built-in example: neal, nix2, bivariate, or model-pair.
    Example { name: String },
    /// Calibration test: repeated inference on an analytic problem.
    PpTest,
    /// Student-t tail reconstruction demo (plot-ready CSV).
    TailDemo,
    /// Nested-sampling evidence oracle for a built-in problem.
    Ns { problem: String },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Input(_) | Error::InvalidArgument(_) | Error::Io(_) | Error::Csv(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    // flags win over config-file values
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }

    let out = &cli.out;
    match &cli.command {
        Command::Infer { input } => {
            let config = config.resolve(&RunConfig::default());
            commands::cmd_infer(input, &config, out)
        }
        Command::Example { name } => {
            let config = config.resolve(&commands::example_defaults(name));
            commands::cmd_example(name, &config, out)
        }
        Command::PpTest => {
            let config = config.resolve(&RunConfig::default());
            commands::cmd_pp_test(&config, out)
        }
        Command::TailDemo => {
            let config = config.resolve(&RunConfig::default());
            commands::cmd_tail_demo(&config, out)
        }
        Command::Ns { problem } => {
            let config = config.resolve(&RunConfig::default());
            commands::cmd_ns(problem, &config, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
