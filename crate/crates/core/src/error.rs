// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by the detection pipeline, the simulators and the metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MojoError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The median heuristic collapsed to zero because every eligible pair of
    /// lagged observations coincides. Supply an explicit kernel scale.
    #[error("degenerate kernel scale at lag {lag}: all eligible pairwise distances are zero; supply an explicit scale")]
    DegenerateScale { lag: usize },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("nonstationary process: {0}")]
    Nonstationary(String),
}

impl MojoError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::InvalidConfig(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, MojoError>;
