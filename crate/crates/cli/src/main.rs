use std::process::ExitCode;

use clap::Parser;
use ebc_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("ebc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
