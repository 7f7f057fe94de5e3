// SPDX-License-Identifier: MIT OR Apache-2.0

use clap::Parser;
use npmojo_cli::{run, Cli, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("npmojo: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
