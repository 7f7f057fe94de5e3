// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end detection: single lag, multiple lags, multiple bandwidths and
//! adaptive lag selection.

use crate::bootstrap::{importance_score, run_bootstrap, run_in_pool, BootstrapConfig};
use crate::detector::{detector_profile, DetectorProfile};
use crate::error::{MojoError, Result};
use crate::kernels::{median_trick, KernelFamily, KernelSpec, DEFAULT_MEDIAN_CAP};
use crate::rng::{derive_seed, TAG_BOOTSTRAP, TAG_MEDIAN};
use crate::segment::{
    locate_changes, multi_lag_merge, multiscale_merge, ChangePointEstimate, MergeParams,
};
use crate::series::{make_lagged, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default lag set.
pub const DEFAULT_LAGS: [usize; 3] = [0, 1, 2];

/// Default upper bound on the lags explored by [`adaptive_lags`].
pub const DEFAULT_MAX_LAG: usize = 20;

/// Recommended bandwidth `floor(n / 6)`.
pub fn default_bandwidth(n: usize) -> usize {
    n / 6
}

/// A kernel family with either a fixed scale or the median heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelChoice {
    pub family: KernelFamily,
    /// `None` selects the median heuristic per lag.
    pub scale: Option<f64>,
    /// Pair budget for the median heuristic.
    pub median_cap: usize,
}

impl Default for KernelChoice {
    fn default() -> Self {
        Self {
            family: KernelFamily::QuadExp,
            scale: None,
            median_cap: DEFAULT_MEDIAN_CAP,
        }
    }
}

impl KernelChoice {
    pub fn fixed(spec: KernelSpec) -> Self {
        Self {
            family: spec.family(),
            scale: Some(spec.scale()),
            median_cap: DEFAULT_MEDIAN_CAP,
        }
    }

    pub fn median(family: KernelFamily) -> Self {
        Self {
            family,
            ..Self::default()
        }
    }
}

/// Output of single-lag detection.
#[derive(Clone, Debug, PartialEq)]
pub struct LagResult {
    pub lag: usize,
    pub bandwidth: usize,
    pub kernel: KernelSpec,
    pub threshold: f64,
    pub estimates: Vec<ChangePointEstimate>,
    pub profile: DetectorProfile,
    pub replicates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiLagResult {
    pub bandwidth: usize,
    pub per_lag: Vec<LagResult>,
    pub merged: Vec<ChangePointEstimate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiscaleResult {
    pub per_bandwidth: Vec<MultiLagResult>,
    pub merged: Vec<ChangePointEstimate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveResult {
    pub initial: MultiLagResult,
    /// Single-lag runs beyond the initial set, in increasing lag.
    pub extra: Vec<LagResult>,
    pub estimates: Vec<ChangePointEstimate>,
    /// Every lag examined, initial set included.
    pub lags: Vec<usize>,
    /// First lag that contributed nothing; `None` when `max_lag` was reached.
    pub stopped_at: Option<usize>,
}

/// Resolves the kernel for one lag, applying the median heuristic if needed.
pub fn resolve_kernel(
    ts: &TimeSeries,
    lag: usize,
    bandwidth: usize,
    choice: &KernelChoice,
    master_seed: u64,
) -> Result<KernelSpec> {
    if let Some(scale) = choice.scale {
        return KernelSpec::new(choice.family, scale);
    }
    if choice.family == KernelFamily::Energy {
        return KernelSpec::from_median(choice.family, 1.0);
    }
    let ls = make_lagged(ts, lag)?;
    let seed = derive_seed(master_seed, &[TAG_MEDIAN, bandwidth as u64, lag as u64]);
    let delta = median_trick(&ls, bandwidth, choice.median_cap, seed)?;
    KernelSpec::from_median(choice.family, delta)
}

/// Single-lag detection: profile, bootstrap threshold, local maxima, scores.
pub fn np_mojo_single(
    ts: &TimeSeries,
    lag: usize,
    bandwidth: usize,
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
) -> Result<LagResult> {
    bcfg.validate()?;
    params.validate()?;
    run_in_pool(bcfg.threads, || {
        single_inner(ts, lag, bandwidth, kernel, bcfg, params)
    })?
}

fn single_inner(
    ts: &TimeSeries,
    lag: usize,
    bandwidth: usize,
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
) -> Result<LagResult> {
    let ls = make_lagged(ts, lag)?;
    let spec = resolve_kernel(ts, lag, bandwidth, kernel, bcfg.master_seed)?;
    let profile = detector_profile(&ls, bandwidth, &spec)?;
    let lag_cfg = BootstrapConfig {
        master_seed: derive_seed(
            bcfg.master_seed,
            &[TAG_BOOTSTRAP, bandwidth as u64, lag as u64],
        ),
        threads: 0,
        ..bcfg.clone()
    };
    let boot = run_bootstrap(&ls, bandwidth, &spec, &lag_cfg)?;
    let mut estimates = locate_changes(&profile, boot.threshold, params);
    for e in &mut estimates {
        e.score = importance_score(e.stat, &boot.replicates);
    }
    Ok(LagResult {
        lag,
        bandwidth,
        kernel: spec,
        threshold: boot.threshold,
        estimates,
        profile,
        replicates: boot.replicates,
    })
}

fn normalise_lags(lags: &[usize]) -> Result<Vec<usize>> {
    let mut out = lags.to_vec();
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(MojoError::config("lag set must be non-empty"));
    }
    Ok(out)
}

/// Multi-lag detection: single-lag runs per lag followed by the lag merge.
pub fn np_mojo_multi(
    ts: &TimeSeries,
    lags: &[usize],
    bandwidth: usize,
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
) -> Result<MultiLagResult> {
    bcfg.validate()?;
    params.validate()?;
    let lags = normalise_lags(lags)?;
    run_in_pool(bcfg.threads, || {
        multi_inner(ts, &lags, bandwidth, kernel, bcfg, params)
    })?
}

fn multi_inner(
    ts: &TimeSeries,
    lags: &[usize],
    bandwidth: usize,
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
) -> Result<MultiLagResult> {
    let per_lag = lags
        .par_iter()
        .map(|&lag| single_inner(ts, lag, bandwidth, kernel, bcfg, params))
        .collect::<Result<Vec<_>>>()?;
    let candidates: Vec<Vec<ChangePointEstimate>> =
        per_lag.iter().map(|r| r.estimates.clone()).collect();
    let merged = multi_lag_merge(&candidates, bandwidth, params);
    Ok(MultiLagResult {
        bandwidth,
        per_lag,
        merged,
    })
}

/// Multi-lag detection at every bandwidth, merged bottom-up.
pub fn np_mojo_multiscale(
    ts: &TimeSeries,
    lags: &[usize],
    bandwidths: &[usize],
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
) -> Result<MultiscaleResult> {
    bcfg.validate()?;
    params.validate()?;
    let lags = normalise_lags(lags)?;
    if bandwidths.is_empty() {
        return Err(MojoError::config("bandwidth ladder must be non-empty"));
    }
    if bandwidths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MojoError::config(
            "multiscale bandwidths must be strictly increasing",
        ));
    }
    run_in_pool(bcfg.threads, || {
        let per_bandwidth = bandwidths
            .par_iter()
            .map(|&g| multi_inner(ts, &lags, g, kernel, bcfg, params))
            .collect::<Result<Vec<_>>>()?;
        let ladder: Vec<(usize, Vec<ChangePointEstimate>)> = per_bandwidth
            .iter()
            .map(|r| (r.bandwidth, r.merged.clone()))
            .collect();
        let merged = multiscale_merge(&ladder, params)?;
        Ok(MultiscaleResult {
            per_bandwidth,
            merged,
        })
    })?
}

/// Multi-lag detection on `initial_lags`, then single lags `L+1, L+2, ...`
/// while each new lag contributes an estimate at least `c G` away from those
/// already accepted. Lags above `max_lag` are never examined.
pub fn adaptive_lags(
    ts: &TimeSeries,
    initial_lags: &[usize],
    bandwidth: usize,
    kernel: &KernelChoice,
    bcfg: &BootstrapConfig,
    params: &MergeParams,
    max_lag: usize,
) -> Result<AdaptiveResult> {
    bcfg.validate()?;
    params.validate()?;
    let lags = normalise_lags(initial_lags)?;
    run_in_pool(bcfg.threads, || {
        let initial = multi_inner(ts, &lags, bandwidth, kernel, bcfg, params)?;
        let mut estimates = initial.merged.clone();
        let mut examined = lags.clone();
        let mut extra = Vec::new();
        let min_sep = params.c * bandwidth as f64;
        let mut lag = lags[lags.len() - 1] + 1;
        let mut stopped_at = None;
        while lag <= max_lag && lag < bandwidth && ts.len() > lag {
            let res = single_inner(ts, lag, bandwidth, kernel, bcfg, params)?;
            examined.push(lag);
            let before = estimates.len();
            for est in &res.estimates {
                let far = estimates
                    .iter()
                    .all(|a| (a.location.abs_diff(est.location) as f64) >= min_sep);
                if far {
                    estimates.push(est.clone());
                }
            }
            let added = estimates.len() > before;
            extra.push(res);
            if !added {
                stopped_at = Some(lag);
                break;
            }
            lag += 1;
        }
        estimates.sort_by_key(|e| (e.location, e.lag));
        Ok(AdaptiveResult {
            initial,
            extra,
            estimates,
            lags: examined,
            stopped_at,
        })
    })?
}
