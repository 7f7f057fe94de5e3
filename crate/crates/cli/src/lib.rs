// SPDX-License-Identifier: MIT OR Apache-2.0

//! Library half of the `npmojo` command-line tool.
//!
//! Every subcommand is a plain function returning the text it would print,
//! so the binary is a thin wrapper and tests can drive commands in-process.

#![forbid(unsafe_code)]

pub mod bench;
pub mod detect;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod simulate;

use clap::{Parser, Subcommand};

pub use detect::{DetectArgs, DetectOptions, Document};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "npmojo", version, about = "Nonparametric multi-lag change-point detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect change points in a CSV file.
    Detect(DetectArgs),
    /// Write a catalog scenario to CSV with its true change points.
    Simulate(simulate::SimulateArgs),
    /// Score estimated change points against the truth.
    Evaluate(evaluate::EvaluateArgs),
    /// Time the detector and check that its cost grows like n G.
    Bench(bench::BenchArgs),
}

/// Runs a parsed command line, writing results to files or stdout.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Detect(a) => detect::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Evaluate(a) => evaluate::run(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

/// Parses `args` (program name first) and runs it; clap usage errors map to
/// the configuration exit class.
pub fn run_from<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::config(e.to_string()))?;
    run(cli)
}
