// SPDX-License-Identifier: MIT OR Apache-2.0

//! `npmojo bench`: wall time and kernel-evaluation counts of the detector.

use crate::error::{CliError, CliResult};
use crate::io;
use clap::Args;
use npmojo_core::rng::substream;
use npmojo_core::{detector_profile_counted, KernelSpec, TimeSeries};
use rand::Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

/// Accepted range for the fitted log-log slope of evaluations against n G.
pub const SLOPE_RANGE: (f64, f64) = (0.9, 1.15);

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Series lengths, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    pub ns: Vec<usize>,
    /// Bandwidth rule: `n/K` or a fixed integer.
    #[arg(long = "g-rule", default_value = "n/6")]
    pub g_rule: String,
    /// Timed repetitions per length; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub bandwidth: usize,
    pub evaluations: u64,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(evaluations) on log(n G); needs two lengths.
    pub slope: Option<f64>,
}

fn bandwidth_for(rule: &str, n: usize) -> CliResult<usize> {
    let rule = rule.trim();
    let g = if let Some(k) = rule.strip_prefix("n/") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::config(format!("bad --g-rule '{rule}'")))?;
        if k == 0 {
            return Err(CliError::config("--g-rule divisor must be positive"));
        }
        n / k
    } else {
        rule.parse()
            .map_err(|_| CliError::config(format!("bad --g-rule '{rule}'; use n/K or an integer")))?
    };
    Ok(g)
}

pub fn log_log_slope(rows: &[BenchRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (((r.n * r.bandwidth) as f64).ln(), (r.evaluations as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn bench(a: &BenchArgs) -> CliResult<BenchReport> {
    if a.reps == 0 {
        return Err(CliError::config("--reps must be at least 1"));
    }
    if a.ns.is_empty() {
        return Err(CliError::config("--n needs at least one length"));
    }
    let kernel = KernelSpec::quad_exp(1.0)?;
    let mut rows = Vec::new();
    for (i, &n) in a.ns.iter().enumerate() {
        let g = bandwidth_for(&a.g_rule, n)?;
        let mut rng = substream(a.seed, i as u64);
        let ts = TimeSeries::from_column((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let ls = ts.lagged(a.lag)?;
        let mut times = Vec::with_capacity(a.reps);
        let mut evaluations = 0;
        for _ in 0..a.reps {
            let start = Instant::now();
            let (_, count) = detector_profile_counted(&ls, g, &kernel)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            evaluations = count;
        }
        times.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            n,
            bandwidth: g,
            evaluations,
            median_ms: times[times.len() / 2],
        });
    }
    let slope = log_log_slope(&rows);
    Ok(BenchReport { rows, slope })
}

fn table(r: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>8} {:>6} {:>14} {:>10} {:>12}", "n", "G", "evaluations", "per nG", "median ms");
    for row in &r.rows {
        let _ = writeln!(
            s,
            "{:>8} {:>6} {:>14} {:>10.3} {:>12.3}",
            row.n,
            row.bandwidth,
            row.evaluations,
            row.evaluations as f64 / (row.n * row.bandwidth) as f64,
            row.median_ms
        );
    }
    if let Some(slope) = r.slope {
        let _ = writeln!(s, "log-log slope of evaluations on nG: {slope:.4}");
    }
    s
}

pub fn run(a: &BenchArgs) -> CliResult<()> {
    let report = bench(a)?;
    let text = if a.json { io::to_json(&report) } else { table(&report) };
    io::emit(a.out.as_deref(), &text)?;
    match report.slope {
        Some(s) if !(SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&s) => Err(CliError::Check(format!(
            "slope {s:.4} outside [{}, {}]",
            SLOPE_RANGE.0, SLOPE_RANGE.1
        ))),
        _ => Ok(()),
    }
}
