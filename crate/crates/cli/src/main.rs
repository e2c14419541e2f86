mod args;
mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match &cli.command {
        Command::Oracle(a) => commands::oracle(a, &mut out),
        Command::Estimate(a) => commands::estimate(a, &mut out),
        Command::Ball(a) => commands::ball(a, &mut out),
        Command::Check(a) => commands::check(a, &mut out),
        Command::Moran(a) => commands::moran(a, &mut out),
        Command::Export(a) => commands::export(a, &mut out),
    };
    // partial output (e.g. a failing check report) is still printed
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tandim: {e}");
            ExitCode::from(CliError::exit_code(&e))
        }
    }
}
