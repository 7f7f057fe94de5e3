// SPDX-License-Identifier: MIT OR Apache-2.0

//! `npmojo simulate`.

use crate::error::{CliError, CliResult};
use crate::io;
use clap::Args;
use npmojo_core::{generate, LabeledSeries, ScenarioId, ScenarioSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario id, e.g. N1, A1, C2, M4 or EXAMPLE1.
    pub scenario: String,
    /// Series length [default: the scenario's reference length].
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Truth JSON [default: next to the CSV, with extension .truth.json].
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// Sidecar describing a generated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub changes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detectable_lags: Option<BTreeMap<usize, Vec<usize>>>,
}

/// `data.csv` -> `data.truth.json`.
pub fn truth_path_for(csv: &Path) -> PathBuf {
    csv.with_extension("truth.json")
}

pub fn simulate(id: ScenarioId, n: Option<usize>, seed: u64) -> CliResult<(LabeledSeries, Truth)> {
    let n = n.unwrap_or_else(|| ScenarioSpec::reference_length(id));
    let data = generate(&ScenarioSpec::new(id, n, seed))?;
    let truth = Truth {
        scenario: id.name().to_string(),
        n,
        seed,
        changes: data.truth.changes().to_vec(),
        detectable_lags: data.detectable_lags.clone(),
    };
    Ok((data, truth))
}

pub fn run(a: &SimulateArgs) -> CliResult<()> {
    let id: ScenarioId = a.scenario.parse()?;
    if id == ScenarioId::Custom {
        return Err(CliError::config(
            "CUSTOM scenarios are built through the library, not the command line",
        ));
    }
    let (data, truth) = simulate(id, a.n, a.seed)?;
    io::write_csv(&a.out, &data.data)?;
    let tpath = a.truth.clone().unwrap_or_else(|| truth_path_for(&a.out));
    io::emit(Some(&tpath), &io::to_json(&truth))
}
