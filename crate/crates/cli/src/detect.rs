// SPDX-License-Identifier: MIT OR Apache-2.0

//! `npmojo detect`.

use crate::error::{CliError, CliResult};
use crate::io::{self, Impute};
use clap::{Args, Parser};
use npmojo_core::bootstrap::{default_block_param, DEFAULT_ALPHA, DEFAULT_REPS};
use npmojo_core::pipeline::DEFAULT_MAX_LAG;
use npmojo_core::segment::{
    DEFAULT_ETA, DEFAULT_MERGE_C, DEFAULT_MIN_EXCEED_FRAC, DEFAULT_MULTISCALE_C,
};
use npmojo_core::{
    adaptive_lags, default_bandwidth, fibonacci_bandwidths, np_mojo_multi, np_mojo_multiscale,
    np_mojo_single, BootstrapConfig, ChangePointEstimate, KernelChoice, KernelFamily, LagResult,
    MergeParams, MergeSelection, TimeSeries,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Rungs in the automatic multiscale ladder.
pub const DEFAULT_LADDER_LEN: usize = 4;

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Input CSV: one row per time point, one column per dimension.
    pub input: PathBuf,
    /// The first CSV row holds column names.
    #[arg(long)]
    pub header: bool,
    #[arg(long, value_enum, default_value_t = Impute::None)]
    pub impute: Impute,
    /// Result document path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every detector profile as CSV (lag, bandwidth, location, value).
    #[arg(long)]
    pub dump_profile: Option<PathBuf>,
    #[command(flatten)]
    pub opts: DetectOptions,
}

#[derive(Debug, Clone, Args)]
pub struct DetectOptions {
    /// Lags to scan, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub lags: Vec<usize>,
    /// Moving-sum bandwidth G [default: floor(n/6)].
    #[arg(long, conflicts_with = "multiscale")]
    pub bandwidth: Option<usize>,
    /// Run over a bandwidth ladder; without a value a Fibonacci ladder is used.
    #[arg(long, num_args = 0..=1, require_equals = true, value_delimiter = ',')]
    pub multiscale: Option<Vec<usize>>,
    /// Extend the lag set until a lag adds no new change point.
    #[arg(long, conflicts_with = "multiscale")]
    pub adaptive: bool,
    /// Largest lag examined by --adaptive.
    #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
    pub max_lag: usize,
    /// Kernel family: h1 (Gaussian), h2 (quadratic-exponential), h3 (energy).
    #[arg(long, default_value = "h2")]
    pub kernel: KernelFamily,
    /// Kernel scale (beta, delta or gamma) [default: median heuristic; gamma = 1 for h3].
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Bootstrap replications R.
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    /// Multiplier block parameter b_n [default: 1.5 n^(1/3)].
    #[arg(long)]
    pub bn: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long = "merge-c", default_value_t = DEFAULT_MERGE_C)]
    pub merge_c: f64,
    #[arg(long = "ms-C", default_value_t = DEFAULT_MULTISCALE_C)]
    pub ms_c: f64,
    /// Exceedance runs must be longer than this fraction of G.
    #[arg(long, default_value_t = DEFAULT_MIN_EXCEED_FRAC)]
    pub min_exceed: f64,
    /// Which cluster member survives a multi-lag merge.
    #[arg(long, value_enum, default_value_t = Selection::Score)]
    pub selection: Selection,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Selection {
    Score,
    Statistic,
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct OptionsOnly {
    #[command(flatten)]
    opts: DetectOptions,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self::from_flags::<&str>(&[]).expect("defaults parse")
    }
}

impl DetectOptions {
    /// Parses detect flags alone, e.g. `["--lags", "0,1", "--reps", "99"]`.
    pub fn from_flags<S: AsRef<str>>(flags: &[S]) -> CliResult<Self> {
        OptionsOnly::try_parse_from(flags.iter().map(|s| s.as_ref()))
            .map(|o| o.opts)
            .map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Multi,
    Multiscale,
    Adaptive,
}

/// Fully resolved settings, echoed in the result document. Thread count is
/// left out on purpose so documents compare equal across machines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub mode: Mode,
    pub n: usize,
    pub p: usize,
    pub lags: Vec<usize>,
    pub bandwidths: Vec<usize>,
    pub kernel: KernelFamily,
    /// `"median"` or the fixed scale.
    pub scale: serde_json::Value,
    pub alpha: f64,
    pub reps: usize,
    pub bn: f64,
    pub eta: f64,
    pub merge_c: f64,
    pub ms_c: f64,
    pub min_exceed: f64,
    pub selection: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Change {
    pub location: usize,
    pub stat: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagEntry {
    pub lag: usize,
    pub bandwidth: usize,
    /// Kernel scale actually used at this lag.
    pub scale: f64,
    pub threshold: f64,
    pub changes: Vec<Change>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merged {
    pub location: usize,
    pub lag: usize,
    pub bandwidth: usize,
    pub stat: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveInfo {
    pub examined: Vec<usize>,
    pub stopped_at: Option<usize>,
}

/// The JSON result of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub config: ResolvedConfig,
    pub lags: Vec<LagEntry>,
    pub merged: Vec<Merged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<AdaptiveInfo>,
    #[serde(skip)]
    pub profiles: Vec<LagResult>,
}

impl Document {
    pub fn to_json(&self) -> String {
        io::to_json(self)
    }

    pub fn locations(&self) -> Vec<usize> {
        self.merged.iter().map(|m| m.location).collect()
    }

    /// Profiles as CSV rows `lag,bandwidth,location,value`.
    pub fn profile_csv(&self) -> String {
        let mut s = String::from("lag,bandwidth,location,value\n");
        for r in &self.profiles {
            for (k, v) in r.profile.iter() {
                let _ = writeln!(s, "{},{},{k},{v:?}", r.lag, r.bandwidth);
            }
        }
        s
    }
}

fn lag_entry(r: &LagResult) -> LagEntry {
    LagEntry {
        lag: r.lag,
        bandwidth: r.bandwidth,
        scale: r.kernel.scale(),
        threshold: r.threshold,
        changes: r
            .estimates
            .iter()
            .map(|e| Change {
                location: e.location,
                stat: e.stat,
                score: e.score,
            })
            .collect(),
    }
}

fn merged(estimates: &[ChangePointEstimate]) -> Vec<Merged> {
    estimates
        .iter()
        .map(|e| Merged {
            location: e.location,
            lag: e.lag,
            bandwidth: e.bandwidth,
            stat: e.stat,
            score: e.score,
        })
        .collect()
}

/// Runs detection on an in-memory series.
pub fn detect(ts: &TimeSeries, o: &DetectOptions) -> CliResult<Document> {
    let n = ts.len();
    let mut lags = o.lags.clone();
    lags.sort_unstable();
    lags.dedup();
    if lags.is_empty() {
        return Err(CliError::config("--lags must name at least one lag"));
    }
    let mode = if o.multiscale.is_some() {
        Mode::Multiscale
    } else if o.adaptive {
        Mode::Adaptive
    } else if lags.len() == 1 {
        Mode::Single
    } else {
        Mode::Multi
    };
    let bandwidths = match &o.multiscale {
        Some(ladder) if !ladder.is_empty() => ladder.clone(),
        Some(_) => {
            let ladder = fibonacci_bandwidths(n, DEFAULT_LADDER_LEN);
            if ladder.is_empty() {
                return Err(CliError::config(format!(
                    "series of length {n} is too short for the default bandwidth ladder"
                )));
            }
            ladder
        }
        None => vec![o.bandwidth.unwrap_or_else(|| default_bandwidth(n))],
    };
    if let Some(s) = o.scale {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::config(format!("--scale must be positive; got {s}")));
        }
    }
    let kernel = KernelChoice {
        family: o.kernel,
        scale: o.scale,
        ..KernelChoice::default()
    };
    let bn = o.bn.unwrap_or_else(|| default_block_param(n));
    let bcfg = BootstrapConfig {
        reps: o.reps,
        alpha: o.alpha,
        block_param: bn,
        master_seed: o.seed,
        threads: o.threads,
    };
    let params = MergeParams {
        eta: o.eta,
        c: o.merge_c,
        big_c: o.ms_c,
        min_exceed_frac: o.min_exceed,
        selection: match o.selection {
            Selection::Score => MergeSelection::Score,
            Selection::Statistic => MergeSelection::Statistic,
        },
    };
    let g = bandwidths[0];
    let (profiles, merged_est, adaptive) = match mode {
        Mode::Single => {
            let r = np_mojo_single(ts, lags[0], g, &kernel, &bcfg, &params)?;
            let est = r.estimates.clone();
            (vec![r], est, None)
        }
        Mode::Multi => {
            let r = np_mojo_multi(ts, &lags, g, &kernel, &bcfg, &params)?;
            (r.per_lag, r.merged, None)
        }
        Mode::Multiscale => {
            let r = np_mojo_multiscale(ts, &lags, &bandwidths, &kernel, &bcfg, &params)?;
            let per = r.per_bandwidth.into_iter().flat_map(|b| b.per_lag).collect();
            (per, r.merged, None)
        }
        Mode::Adaptive => {
            let r = adaptive_lags(ts, &lags, g, &kernel, &bcfg, &params, o.max_lag)?;
            let mut per = r.initial.per_lag;
            per.extend(r.extra);
            let info = AdaptiveInfo {
                examined: r.lags,
                stopped_at: r.stopped_at,
            };
            (per, r.estimates, Some(info))
        }
    };
    let config = ResolvedConfig {
        mode,
        n,
        p: ts.dim(),
        lags,
        bandwidths,
        kernel: o.kernel,
        scale: match (o.scale, o.kernel) {
            (Some(s), _) => s.into(),
            (None, KernelFamily::Energy) => npmojo_core::kernels::DEFAULT_ENERGY_GAMMA.into(),
            (None, _) => "median".into(),
        },
        alpha: o.alpha,
        reps: o.reps,
        bn,
        eta: o.eta,
        merge_c: o.merge_c,
        ms_c: o.ms_c,
        min_exceed: o.min_exceed,
        selection: match o.selection {
            Selection::Score => "score",
            Selection::Statistic => "statistic",
        },
        seed: o.seed,
        max_lag: (mode == Mode::Adaptive).then_some(o.max_lag),
    };
    Ok(Document {
        config,
        lags: profiles.iter().map(lag_entry).collect(),
        merged: merged(&merged_est),
        adaptive,
        profiles,
    })
}

pub fn run(a: &DetectArgs) -> CliResult<()> {
    let ts = io::read_csv(&a.input, a.header, a.impute)?;
    let doc = detect(&ts, &a.opts)?;
    if let Some(path) = &a.dump_profile {
        io::emit(Some(path), &doc.profile_csv())?;
    }
    io::emit(a.out.as_deref(), &doc.to_json())
}
