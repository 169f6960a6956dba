mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors, matching validation failures
    let cli = Cli::parse();
    match commands::execute(cli.command).and_then(|files| output::write_all(&files)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kinsplit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
