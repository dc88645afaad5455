mod args;
mod commands;
mod compare;
mod error;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    // a panic is a bug in the library; the hook has already printed it
    match std::panic::catch_unwind(|| commands::run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("ckptsel: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(error::EXIT_BUG),
    }
}
