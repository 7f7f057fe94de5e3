// SPDX-License-Identifier: MIT OR Apache-2.0

use npmojo_core::MojoError;
use std::fmt;

/// Failure of a subcommand, carrying the process exit code class.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or malformed input files (exit 2).
    Input(String),
    /// Parameter or configuration violation (exit 3).
    Config(String),
    /// Median heuristic collapsed at some lag (exit 4).
    Degenerate(String),
    /// A self-check reported by `bench` failed (exit 1).
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Check(_) => 1,
            Self::Input(_) => 2,
            Self::Config(_) => 3,
            Self::Degenerate(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Degenerate(m) => write!(f, "{m}"),
            Self::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<MojoError> for CliError {
    fn from(e: MojoError) -> Self {
        match e {
            MojoError::InvalidInput(m) => Self::Input(m),
            MojoError::DimensionMismatch { .. } => Self::Input(e.to_string()),
            MojoError::DegenerateScale { .. } => Self::Degenerate(e.to_string()),
            MojoError::InvalidConfig(m) => Self::Config(m),
            MojoError::UnknownScenario(_) | MojoError::Nonstationary(_) => {
                Self::Config(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
