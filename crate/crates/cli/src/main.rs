//! `knalg`: command-line front end for exact Krichever–Novikov algebras on
//! the marked sphere.
//!
//! Exit codes: `0` success, `2` configuration error, `3` verification
//! failure.

mod commands;
mod config;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    }
    let cfg = cli.global.resolve()?;
    commands::dispatch(&cfg, &cli.command)
}
