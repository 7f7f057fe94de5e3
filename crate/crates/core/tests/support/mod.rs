// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here is written directly from the defining formulas, with no
//! calls into the library's numerical code, so that agreement is meaningful.

#![allow(dead_code)]

pub mod checks;

use npmojo_core::{ChangePointEstimate, KernelFamily, MergeSelection};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Kernel from its closed form.
pub fn kernel(family: KernelFamily, scale: f64, x: &[f64], y: &[f64]) -> f64 {
    match family {
        KernelFamily::Gauss => {
            let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            (-scale * scale * sq / 2.0).exp()
        }
        KernelFamily::QuadExp => x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let d2 = (a - b).powi(2);
                (2.0 * scale - d2) * (-d2 / (4.0 * scale)).exp() / (2.0 * scale)
            })
            .product(),
        KernelFamily::Energy => {
            let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            sq.sqrt().powf(scale)
        }
    }
}

fn sign(family: KernelFamily) -> f64 {
    match family {
        KernelFamily::Energy => -1.0,
        _ => 1.0,
    }
}

/// `Y_t = (X_t, X_{t+lag})` for 1-based `t`, stored at index `t`; index 0 unused.
fn stacked(x: &[Vec<f64>], lag: usize) -> Vec<Vec<f64>> {
    let mut y = vec![Vec::new()];
    for t in 0..x.len() - lag {
        let mut row = x[t].clone();
        row.extend_from_slice(&x[t + lag]);
        y.push(row);
    }
    y
}

/// `T_l(G, k)` at 1-based location `k` by the literal double sums.
pub fn detector(
    x: &[Vec<f64>],
    lag: usize,
    g: usize,
    k: usize,
    family: KernelFamily,
    scale: f64,
) -> f64 {
    let y = stacked(x, lag);
    let left: Vec<usize> = (k - g + 1..=k - lag).collect();
    let right: Vec<usize> = (k + 1..=k + g - lag).collect();
    let h = |s: usize, t: usize| kernel(family, scale, &y[s], &y[t]);
    let mut total = 0.0;
    for &s in &left {
        for &t in &left {
            total += h(s, t);
        }
    }
    for &s in &right {
        for &t in &right {
            total += h(s, t);
        }
    }
    for &s in &left {
        for &t in &right {
            total -= 2.0 * h(s, t);
        }
    }
    sign(family) * total / ((g - lag) as f64).powi(2)
}

/// Maximum over `k` of the multiplier-weighted statistic with
/// window-centred multipliers; `w[t - 1]` holds `W_t`.
pub fn bootstrap_statistic(
    x: &[Vec<f64>],
    lag: usize,
    g: usize,
    family: KernelFamily,
    scale: f64,
    w: &[f64],
) -> f64 {
    let n = x.len();
    let y = stacked(x, lag);
    let m = (g - lag) as f64;
    let big_w = |t: usize| w[t - 1];
    let mut best = f64::NEG_INFINITY;
    for k in g..=n - g {
        let mean: f64 = (k - g + 1..=k - lag).map(big_w).sum::<f64>() / m;
        let wbar = |t: usize| big_w(t) - mean;
        let mut total = 0.0;
        for s in k - g + 1..=k - lag {
            for t in k - g + 1..=k - lag {
                total += wbar(s) * wbar(t) * kernel(family, scale, &y[s], &y[t]);
            }
        }
        for s in k + 1..=k + g - lag {
            for t in k + 1..=k + g - lag {
                total += wbar(s - g) * wbar(t - g) * kernel(family, scale, &y[s], &y[t]);
            }
        }
        for s in k - g + 1..=k - lag {
            for t in k + 1..=k + g - lag {
                total -= 2.0 * wbar(s) * wbar(t - g) * kernel(family, scale, &y[s], &y[t]);
            }
        }
        best = best.max(sign(family) * total / (m * m));
    }
    best
}

/// Segments of `{1..n}` as explicit index sets; change `c` ends a segment at `c`.
pub fn partition(n: usize, changes: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut bounds = vec![0];
    bounds.extend_from_slice(changes);
    bounds.push(n);
    bounds
        .windows(2)
        .map(|b| (b[0] + 1..=b[1]).collect())
        .collect()
}

/// Covering metric from set intersections and unions.
pub fn covering(n: usize, est: &[usize], truth: &[usize]) -> f64 {
    let est_sets = partition(n, est);
    let mut total = 0.0;
    for a in partition(n, truth) {
        let mut best = 0.0f64;
        for b in &est_sets {
            let inter = a.intersection(b).count() as f64;
            let union = a.union(b).count() as f64;
            best = best.max(inter / union);
        }
        total += a.len() as f64 * best;
    }
    total / n as f64
}

/// V-measure from a full contingency table of per-point labels.
pub fn v_measure(n: usize, est: &[usize], truth: &[usize]) -> f64 {
    let label = |changes: &[usize]| -> Vec<usize> {
        (1..=n)
            .map(|t| changes.iter().filter(|&&c| c < t).count())
            .collect()
    };
    let c = label(truth);
    let k = label(est);
    let nc = truth.len() + 1;
    let nk = est.len() + 1;
    let mut table = vec![vec![0.0f64; nk]; nc];
    for t in 0..n {
        table[c[t]][k[t]] += 1.0;
    }
    let nf = n as f64;
    let row: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..nk).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let ent = |v: &[f64]| -> f64 {
        v.iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -(x / nf) * (x / nf).ln())
            .sum()
    };
    let h_c = ent(&row);
    let h_k = ent(&col);
    // H(C|K) = -sum_ck n_ck/n log(n_ck / n_k)
    let mut h_c_given_k = 0.0;
    let mut h_k_given_c = 0.0;
    for i in 0..nc {
        for j in 0..nk {
            let v = table[i][j];
            if v > 0.0 {
                h_c_given_k -= v / nf * (v / col[j]).ln();
                h_k_given_c -= v / nf * (v / row[i]).ln();
            }
        }
    }
    let hom = if h_c == 0.0 { 1.0 } else { 1.0 - h_c_given_k / h_c };
    let comp = if h_k == 0.0 { 1.0 } else { 1.0 - h_k_given_c / h_k };
    if hom + comp == 0.0 {
        0.0
    } else {
        2.0 * hom * comp / (hom + comp)
    }
}

/// Profile indices (0-based) selected by the threshold / local-max / run rules.
pub fn locate(values: &[f64], g: usize, threshold: f64, eta: f64, frac: f64) -> Vec<usize> {
    let radius = (eta * g as f64).floor() as i64;
    let min_run = (frac * g as f64).floor() as usize;
    let len = values.len() as i64;
    let mut out = Vec::new();
    for k in 0..len {
        let v = values[k as usize];
        if v <= threshold || v.is_nan() {
            continue;
        }
        let mut ok = true;
        for j in (k - radius).max(0)..=(k + radius).min(len - 1) {
            let u = values[j as usize];
            if (j < k && u >= v) || (j > k && u > v) {
                ok = false;
            }
        }
        let mut run = 1;
        let mut j = k - 1;
        while j >= 0 && values[j as usize] > threshold {
            run += 1;
            j -= 1;
        }
        let mut j = k + 1;
        while j < len && values[j as usize] > threshold {
            run += 1;
            j += 1;
        }
        if ok && run > min_run {
            out.push(k as usize);
        }
    }
    out
}

fn better(a: &ChangePointEstimate, b: &ChangePointEstimate, sel: MergeSelection) -> bool {
    let (a1, a2, b1, b2) = match sel {
        MergeSelection::Score => (a.score, a.stat, b.score, b.stat),
        MergeSelection::Statistic => (a.stat, a.score, b.stat, b.score),
    };
    if a1 != b1 {
        return a1 > b1;
    }
    if a2 != b2 {
        return a2 > b2;
    }
    if a.location != b.location {
        return a.location < b.location;
    }
    a.lag < b.lag
}

/// Pool, take the minimum, cluster everything within `c G`, keep the best.
pub fn merge(
    candidates: &[Vec<ChangePointEstimate>],
    g: usize,
    c: f64,
    sel: MergeSelection,
) -> Vec<ChangePointEstimate> {
    let mut remaining: Vec<ChangePointEstimate> = candidates.concat();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let t0 = remaining.iter().map(|e| e.location).min().unwrap();
        let (cluster, rest): (Vec<_>, Vec<_>) = remaining
            .into_iter()
            .partition(|e| ((e.location - t0) as f64) < c * g as f64);
        let mut best = cluster[0].clone();
        for e in &cluster[1..] {
            if better(e, &best, sel) {
                best = e.clone();
            }
        }
        out.push(best);
        remaining = rest;
    }
    out
}

/// Bottom-up acceptance over increasing bandwidths.
pub fn multiscale(ladder: &[(usize, Vec<ChangePointEstimate>)], big_c: f64) -> Vec<(usize, usize, usize)> {
    let mut accepted: Vec<ChangePointEstimate> = ladder[0].1.clone();
    for (g, ests) in &ladder[1..] {
        let mut ests = ests.clone();
        ests.sort_by_key(|e| (e.location, e.lag));
        for e in ests {
            if accepted
                .iter()
                .all(|a| (a.location as f64 - e.location as f64).abs() >= big_c * *g as f64)
            {
                accepted.push(e);
            }
        }
    }
    let mut keys: Vec<_> = accepted
        .iter()
        .map(|e| (e.location, e.lag, e.bandwidth))
        .collect();
    keys.sort_unstable();
    keys
}

pub fn random_series(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect()
}

pub fn random_changes(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let q = rng.gen_range(0..6usize.min(n));
    let mut set = BTreeSet::new();
    for _ in 0..q {
        set.insert(rng.gen_range(1..n));
    }
    set.into_iter().collect()
}

/// Candidate lists with coarse scores and stats so that ties occur.
pub fn random_candidates(
    rng: &mut ChaCha8Rng,
    lags: usize,
    n: usize,
    g: usize,
) -> Vec<Vec<ChangePointEstimate>> {
    (0..lags)
        .map(|lag| {
            let count = rng.gen_range(0..8);
            let mut locs: Vec<usize> = (0..count).map(|_| rng.gen_range(g..=n - g)).collect();
            locs.sort_unstable();
            locs.dedup();
            locs.into_iter()
                .map(|location| ChangePointEstimate {
                    location,
                    lag,
                    stat: rng.gen_range(0..4) as f64 * 0.25,
                    score: rng.gen_range(0..5) as f64 * 0.25,
                    bandwidth: g,
                })
                .collect()
        })
        .collect()
}
