// SPDX-License-Identifier: MIT OR Apache-2.0

//! `npmojo evaluate`.

use crate::error::{CliError, CliResult};
use crate::io;
use clap::Args;
use npmojo_core::{aggregate, EvalReport, Segmentation, Summary};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["estimate", "batch"])))]
pub struct EvaluateArgs {
    /// Detection result or truth-style JSON with the estimated change points.
    #[arg(requires = "truth")]
    pub estimate: Option<PathBuf>,
    /// Truth JSON written by `simulate`.
    pub truth: Option<PathBuf>,
    /// Directory of `<name>.truth.json` / `<name>.result.json` pairs; prints a
    /// summary row over all of them.
    #[arg(long, conflicts_with = "estimate")]
    pub batch: Option<PathBuf>,
    /// Print the batch summary as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn usize_list(v: &Value, what: &str) -> CliResult<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| CliError::input(format!("{what}: expected an array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| CliError::input(format!("{what}: non-integer entry {x}")))
        })
        .collect()
}

/// Extracts `(n, changes)` from a result document or a truth file.
pub fn changes_of(doc: &Value) -> CliResult<(usize, Vec<usize>)> {
    if let Some(merged) = doc.get("merged") {
        let n = doc
            .pointer("/config/n")
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::input("result document lacks config.n"))?;
        let locs = merged
            .as_array()
            .ok_or_else(|| CliError::input("merged: expected an array"))?
            .iter()
            .map(|m| m.get("location").cloned().unwrap_or(Value::Null))
            .collect::<Vec<_>>();
        return Ok((n as usize, usize_list(&Value::Array(locs), "merged")?));
    }
    let n = doc
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::input("document has neither 'merged' nor 'n'"))?;
    let changes = usize_list(doc.get("changes").unwrap_or(&Value::Null), "changes")?;
    Ok((n as usize, changes))
}

pub fn evaluate_docs(est: &Value, truth: &Value) -> CliResult<EvalReport> {
    let (n_est, est) = changes_of(est)?;
    let (n_true, truth) = changes_of(truth)?;
    if n_est != n_true {
        return Err(CliError::config(format!(
            "series lengths differ: estimate n = {n_est}, truth n = {n_true}"
        )));
    }
    let est = Segmentation::from_unsorted(n_est, est)?;
    let truth = Segmentation::from_unsorted(n_true, truth)?;
    Ok(EvalReport::new(&est, &truth)?)
}

/// Pairs every `<name>.truth.json` in `dir` with `<name>.result.json`.
pub fn evaluate_dir(dir: &Path) -> CliResult<Vec<EvalReport>> {
    let mut stems = Vec::new();
    for entry in std::fs::read_dir(dir)
        .map_err(|e| CliError::input(format!("cannot list {}: {e}", dir.display())))?
    {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".truth.json") {
            stems.push(stem.to_string());
        }
    }
    if stems.is_empty() {
        return Err(CliError::input(format!("no *.truth.json files in {}", dir.display())));
    }
    stems.sort();
    stems
        .iter()
        .map(|s| {
            let truth = io::read_json(&dir.join(format!("{s}.truth.json")))?;
            let est = io::read_json(&dir.join(format!("{s}.result.json")))?;
            evaluate_docs(&est, &truth)
        })
        .collect()
}

/// One table row: proportions of `q_hat - q` per bin, then mean CM and VM.
pub fn summary_table(s: &Summary) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>6}", "runs");
    for label in Summary::BIN_LABELS {
        let _ = write!(out, " {label:>7}");
    }
    let _ = writeln!(out, " {:>7} {:>7}", "CM", "VM");
    let _ = write!(out, "{:>6}", s.runs);
    for p in s.q_error {
        let _ = write!(out, " {p:>7.3}");
    }
    let _ = writeln!(out, " {:>7.3} {:>7.3}", s.mean_cm, s.mean_vm);
    out
}

pub fn run(a: &EvaluateArgs) -> CliResult<()> {
    let text = if let Some(dir) = &a.batch {
        let summary = aggregate(&evaluate_dir(dir)?)?;
        if a.json {
            io::to_json(&summary)
        } else {
            summary_table(&summary)
        }
    } else {
        let est = io::read_json(a.estimate.as_deref().expect("clap enforces"))?;
        let truth = io::read_json(a.truth.as_deref().expect("clap enforces"))?;
        io::to_json(&evaluate_docs(&est, &truth)?)
    };
    io::emit(a.out.as_deref(), &text)
}
