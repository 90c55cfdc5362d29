mod cli;
mod commands;
mod config;
mod error;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::{exit_code, CliError};

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Session(args) => commands::session::run(args),
        Command::Interactive(args) => commands::interactive::run(args),
        Command::ReproduceFigures(args) => commands::figures::run(args),
    }
}

fn main() {
    match run() {
        Ok(()) => std::process::exit(exit_code::SUCCESS),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
