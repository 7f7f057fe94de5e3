// SPDX-License-Identifier: MIT OR Apache-2.0

//! Turning detector profiles into change-point sets.
//!
//! * [`locate_changes`]: threshold exceedances that are local maxima over
//!   `+- floor(eta G)` and sit in a long enough exceedance run.
//! * [`multi_lag_merge`]: clusters estimates pooled over lags and keeps the
//!   most important one per cluster.
//! * [`multiscale_merge`]: bottom-up merging over a bandwidth ladder.

use crate::detector::DetectorProfile;
use crate::error::{MojoError, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const DEFAULT_ETA: f64 = 0.4;
pub const DEFAULT_MERGE_C: f64 = 1.0;
pub const DEFAULT_MULTISCALE_C: f64 = 0.8;
pub const DEFAULT_MIN_EXCEED_FRAC: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangePointEstimate {
    pub location: usize,
    pub lag: usize,
    pub stat: f64,
    pub score: f64,
    pub bandwidth: usize,
}

/// Which cluster member survives a multi-lag merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeSelection {
    /// Largest bootstrap importance score, then largest statistic.
    #[default]
    Score,
    /// Largest detector statistic at the detecting lag, then largest score.
    Statistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeParams {
    /// Local-maximum half-width as a fraction of `G`.
    pub eta: f64,
    /// Multi-lag cluster width as a fraction of `G`.
    pub c: f64,
    /// Multiscale separation as a fraction of the coarser `G`.
    pub big_c: f64,
    /// Exceedance runs must be longer than `floor(min_exceed_frac * G)`.
    pub min_exceed_frac: f64,
    pub selection: MergeSelection,
}

impl Default for MergeParams {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            c: DEFAULT_MERGE_C,
            big_c: DEFAULT_MULTISCALE_C,
            min_exceed_frac: DEFAULT_MIN_EXCEED_FRAC,
            selection: MergeSelection::Score,
        }
    }
}

impl MergeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(MojoError::config(format!(
                "eta must lie in (0, 1); got {}",
                self.eta
            )));
        }
        if !(self.c > 0.0 && self.c <= 2.0) {
            return Err(MojoError::config(format!(
                "merge c must lie in (0, 2]; got {}",
                self.c
            )));
        }
        if !(self.big_c > 0.0 && self.big_c < 1.0) {
            return Err(MojoError::config(format!(
                "multiscale C must lie in (0, 1); got {}",
                self.big_c
            )));
        }
        if !(self.min_exceed_frac >= 0.0 && self.min_exceed_frac.is_finite()) {
            return Err(MojoError::config(format!(
                "min_exceed_frac must be finite and non-negative; got {}",
                self.min_exceed_frac
            )));
        }
        Ok(())
    }

    /// `floor(eta G)`
    pub fn eta_radius(&self, bandwidth: usize) -> usize {
        (self.eta * bandwidth as f64).floor() as usize
    }

    /// `floor(min_exceed_frac G)`
    pub fn min_run(&self, bandwidth: usize) -> usize {
        (self.min_exceed_frac * bandwidth as f64).floor() as usize
    }
}

/// An ordered set of change points partitioning `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    n: usize,
    changes: Vec<usize>,
}

impl Segmentation {
    /// `changes` must be strictly increasing and lie in `1..n`.
    pub fn new(n: usize, changes: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(MojoError::input("segmentation length must be >= 1"));
        }
        if changes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MojoError::input(format!(
                "change points must be strictly increasing: {changes:?}"
            )));
        }
        if let Some(c) = changes.iter().find(|c| **c == 0 || **c >= n) {
            return Err(MojoError::input(format!(
                "change point {c} outside 1..{}",
                n - 1
            )));
        }
        Ok(Self { n, changes })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(n: usize, mut changes: Vec<usize>) -> Result<Self> {
        changes.sort_unstable();
        changes.dedup();
        Self::new(n, changes)
    }

    pub fn from_estimates(n: usize, estimates: &[ChangePointEstimate]) -> Result<Self> {
        Self::from_unsorted(n, estimates.iter().map(|e| e.location).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn changes(&self) -> &[usize] {
        &self.changes
    }

    pub fn num_changes(&self) -> usize {
        self.changes.len()
    }

    /// Segment boundaries as half-open 0-based ranges.
    pub fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.changes.len() + 1);
        let mut start = 0;
        for &c in &self.changes {
            out.push(start..c);
            start = c;
        }
        out.push(start..self.n);
        out
    }

    /// Segment index of every time point.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = Vec::with_capacity(self.n);
        for (j, seg) in self.segments().into_iter().enumerate() {
            labels.extend(std::iter::repeat(j).take(seg.len()));
        }
        labels
    }
}

/// Selects the significant local maximisers of a detector profile.
///
/// A location `k` is returned when
/// (a) `T(k) > threshold`,
/// (b) `k` is the first maximiser of `T` over `|j - k| <= floor(eta G)`, and
/// (c) the run of consecutive exceedances containing `k` is longer than
///     `floor(min_exceed_frac G)`.
///
/// Scores are left at zero; the pipeline fills them from the bootstrap.
pub fn locate_changes(
    profile: &DetectorProfile,
    threshold: f64,
    params: &MergeParams,
) -> Vec<ChangePointEstimate> {
    let values = profile.values();
    let g = profile.bandwidth();
    let radius = params.eta_radius(g);
    let min_run = params.min_run(g);
    let len = values.len();
    let mut out = Vec::new();

    let mut i = 0;
    while i < len {
        if values[i] <= threshold {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < len && values[i] > threshold {
            i += 1;
        }
        if i - run_start <= min_run {
            continue;
        }
        for k in run_start..i {
            let lo = k.saturating_sub(radius);
            let hi = (k + radius).min(len - 1);
            let v = values[k];
            let is_first_max =
                values[lo..k].iter().all(|x| *x < v) && values[k + 1..=hi].iter().all(|x| *x <= v);
            if is_first_max {
                out.push(ChangePointEstimate {
                    location: g + k,
                    lag: profile.lag(),
                    stat: v,
                    score: 0.0,
                    bandwidth: g,
                });
            }
        }
    }
    out
}

/// Total order used to pick a cluster representative; `Greater` wins.
fn preference(a: &ChangePointEstimate, b: &ChangePointEstimate, sel: MergeSelection) -> Ordering {
    let primary = match sel {
        MergeSelection::Score => a
            .score
            .total_cmp(&b.score)
            .then(a.stat.total_cmp(&b.stat)),
        MergeSelection::Statistic => a
            .stat
            .total_cmp(&b.stat)
            .then(a.score.total_cmp(&b.score)),
    };
    primary
        .then(b.location.cmp(&a.location))
        .then(b.lag.cmp(&a.lag))
}

/// Merges per-lag estimates.
///
/// Repeatedly takes the smallest remaining location `t0`, forms the cluster
/// of remaining candidates with `location - t0 < c G`, and keeps its
/// preferred member (see [`MergeSelection`]; remaining ties go to the smaller
/// location, then the smaller lag).
pub fn multi_lag_merge(
    candidates: &[Vec<ChangePointEstimate>],
    bandwidth: usize,
    params: &MergeParams,
) -> Vec<ChangePointEstimate> {
    let mut pool: Vec<&ChangePointEstimate> = candidates.iter().flatten().collect();
    pool.sort_by(|a, b| a.location.cmp(&b.location).then(a.lag.cmp(&b.lag)));
    let width = params.c * bandwidth as f64;

    let mut out = Vec::new();
    let mut i = 0;
    while i < pool.len() {
        let start = pool[i].location;
        let mut j = i;
        let mut best = pool[i];
        while j < pool.len() && ((pool[j].location - start) as f64) < width {
            if preference(pool[j], best, params.selection) == Ordering::Greater {
                best = pool[j];
            }
            j += 1;
        }
        out.push(best.clone());
        i = j;
    }
    out
}

/// Bottom-up merging across bandwidths.
///
/// Every estimate of the finest bandwidth is accepted. Coarser bandwidths are
/// visited in increasing order, each in increasing location, and an estimate
/// at bandwidth `G_r` is accepted iff it lies at least `C G_r` away from
/// everything accepted so far.
pub fn multiscale_merge(
    per_bandwidth: &[(usize, Vec<ChangePointEstimate>)],
    params: &MergeParams,
) -> Result<Vec<ChangePointEstimate>> {
    if per_bandwidth.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(MojoError::config(
            "multiscale bandwidths must be strictly increasing",
        ));
    }
    let mut accepted: Vec<ChangePointEstimate> = Vec::new();
    for (r, (g, estimates)) in per_bandwidth.iter().enumerate() {
        let mut sorted: Vec<&ChangePointEstimate> = estimates.iter().collect();
        sorted.sort_by_key(|e| (e.location, e.lag));
        if r == 0 {
            accepted.extend(sorted.into_iter().cloned());
            continue;
        }
        let min_sep = params.big_c * *g as f64;
        for est in sorted {
            let far = accepted
                .iter()
                .all(|a| (a.location.abs_diff(est.location) as f64) >= min_sep);
            if far {
                accepted.push(est.clone());
            }
        }
    }
    accepted.sort_by_key(|e| (e.location, e.lag, e.bandwidth));
    Ok(accepted)
}

/// Fibonacci-type bandwidth ladder `G_m = G_{m-1} + G_{m-2}` from
/// `G_0 = G_1 = max(60, floor(n/16))`, keeping at most `max_len` rungs with
/// `2 G <= n`.
pub fn fibonacci_bandwidths(n: usize, max_len: usize) -> Vec<usize> {
    let base = 60.max(n / 16);
    let mut out = Vec::new();
    let (mut prev, mut cur) = (base, base);
    while out.len() < max_len && 2 * cur <= n {
        out.push(cur);
        let next = prev + cur;
        prev = cur;
        cur = next;
    }
    out
}
