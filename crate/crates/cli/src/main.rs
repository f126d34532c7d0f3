//! `starprior` command-line driver.
//!
//! Every subcommand prints one JSON document to stdout; diagnostics go to
//! stderr. Exit codes: 0 success, 1 usage error, 2 data or validation error.

mod args;
mod commands;
mod config;
mod error;
mod util;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let cfg = config::RunConfig::load(&cli.global)?;
    match cli.command {
        Command::Gen(a) => commands::gen::run(&cfg, a),
        Command::Check(a) => commands::check::run(&cfg, a),
        Command::Loss(a) => commands::loss::run(&cfg, a),
        Command::Gradcheck(a) => commands::gradcheck::run(&cfg, a),
        Command::Segment(a) => commands::segment::run(&cfg, a),
        Command::Train(a) => commands::train::run(&cfg, a),
        Command::Eval(a) => commands::eval::run(&cfg, a),
        Command::Render(a) => commands::render::run(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON output");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
