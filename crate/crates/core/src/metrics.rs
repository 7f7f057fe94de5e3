// SPDX-License-Identifier: MIT OR Apache-2.0

//! Segmentation quality: covering metric, V-measure and replication summaries.

use crate::error::{MojoError, Result};
use crate::segment::Segmentation;
use serde::{Deserialize, Serialize};
use std::ops::Range;

fn same_length(est: &Segmentation, truth: &Segmentation) -> Result<()> {
    if est.len() != truth.len() {
        return Err(MojoError::DimensionMismatch {
            expected: truth.len(),
            got: est.len(),
        });
    }
    Ok(())
}

fn overlap(a: &Range<usize>, b: &Range<usize>) -> usize {
    a.end.min(b.end).saturating_sub(a.start.max(b.start))
}

/// Size-weighted best Jaccard overlap of every true segment with the
/// estimated ones. Not symmetric in its arguments.
pub fn covering_metric(est: &Segmentation, truth: &Segmentation) -> Result<f64> {
    same_length(est, truth)?;
    let est_segs = est.segments();
    let n = truth.len() as f64;
    let mut total = 0.0;
    // Both segment lists are sorted, so only overlapping pairs need a look.
    let mut first = 0;
    for a in truth.segments() {
        while est_segs[first].end <= a.start {
            first += 1;
        }
        let mut best = 0.0f64;
        for b in est_segs[first..].iter().take_while(|b| b.start < a.end) {
            let inter = overlap(&a, b);
            let union = a.len() + b.len() - inter;
            best = best.max(inter as f64 / union as f64);
        }
        total += a.len() as f64 * best;
    }
    Ok(total / n)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity, completeness and their harmonic mean, with the true
/// segments as classes and the estimated ones as clusters.
pub fn homogeneity_completeness(est: &Segmentation, truth: &Segmentation) -> Result<(f64, f64, f64)> {
    same_length(est, truth)?;
    let n = truth.len() as f64;
    let classes = truth.segments();
    let clusters = est.segments();
    let h_c = entropy(classes.iter().map(|r| r.len()), n);
    let h_k = entropy(clusters.iter().map(|r| r.len()), n);
    // Joint entropy over the non-empty cells of the contingency table; the
    // cells are intersections of sorted intervals.
    let mut cells = Vec::with_capacity(classes.len() + clusters.len());
    let (mut i, mut j) = (0, 0);
    while i < classes.len() && j < clusters.len() {
        cells.push(overlap(&classes[i], &clusters[j]));
        if classes[i].end <= clusters[j].end {
            i += 1;
        } else {
            j += 1;
        }
    }
    let h_ck = entropy(cells.into_iter(), n);
    let hom = if h_c == 0.0 { 1.0 } else { 1.0 - (h_ck - h_k) / h_c };
    let comp = if h_k == 0.0 { 1.0 } else { 1.0 - (h_ck - h_c) / h_k };
    let v = if hom + comp == 0.0 {
        0.0
    } else {
        2.0 * hom * comp / (hom + comp)
    };
    Ok((hom.clamp(0.0, 1.0), comp.clamp(0.0, 1.0), v.clamp(0.0, 1.0)))
}

/// V-measure (balanced harmonic mean of homogeneity and completeness).
pub fn v_measure(est: &Segmentation, truth: &Segmentation) -> Result<f64> {
    homogeneity_completeness(est, truth).map(|(_, _, v)| v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cm: f64,
    pub vm: f64,
    pub q_hat: usize,
    pub q_true: usize,
}

impl EvalReport {
    pub fn new(est: &Segmentation, truth: &Segmentation) -> Result<Self> {
        Ok(Self {
            cm: covering_metric(est, truth)?,
            vm: v_measure(est, truth)?,
            q_hat: est.num_changes(),
            q_true: truth.num_changes(),
        })
    }

    pub fn q_error(&self) -> i64 {
        self.q_hat as i64 - self.q_true as i64
    }
}

/// One table row: the distribution of `q_hat - q` and the average metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    /// Proportions for `q_hat - q` in `<= -2, -1, 0, 1, >= 2`.
    pub q_error: [f64; 5],
    pub mean_cm: f64,
    pub mean_vm: f64,
}

impl Summary {
    pub const BIN_LABELS: [&'static str; 5] = ["<=-2", "-1", "0", "1", ">=2"];

    pub fn exact_rate(&self) -> f64 {
        self.q_error[2]
    }
}

pub fn aggregate(reports: &[EvalReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(MojoError::input("cannot aggregate an empty report list"));
    }
    let runs = reports.len();
    let mut counts = [0usize; 5];
    for r in reports {
        counts[(r.q_error().clamp(-2, 2) + 2) as usize] += 1;
    }
    let total = runs as f64;
    Ok(Summary {
        runs,
        q_error: counts.map(|c| c as f64 / total),
        mean_cm: reports.iter().map(|r| r.cm).sum::<f64>() / total,
        mean_vm: reports.iter().map(|r| r.vm).sum::<f64>() / total,
    })
}
