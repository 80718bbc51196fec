//! `reprep`: command-line front end for the game, repetition, fortification,
//! powering and no-go tools, plus a resumable campaign runner.
//!
//! Exit codes: 0 passing verdict, 1 failing or refuting verdict, 2 usage or
//! input error, 3 a size cap was exceeded.

mod args;
mod campaign;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli))
}
