// SPDX-License-Identifier: MIT OR Apache-2.0

//! Moving-sum detector profile `T_l(G, k)`.
//!
//! For a bandwidth `G`, lag `l` and `m = G - l`, the detector at
//! `k in [G, n - G]` compares the `m` lagged rows to the left of `k`
//! (`k-G+1 ..= k-l`) with the `m` rows to the right (`k+1 ..= k+G-l`):
//!
//! ```text
//! T(k) = sign / m^2 * ( sum_{L,L} h + sum_{R,R} h - 2 sum_{L,R} h )
//! ```
//!
//! [`detector_profile`] keeps the within-block sums and the cross-block sum as
//! running totals and updates them in `O(G)` kernel evaluations per step,
//! for `O(nG)` overall. [`direct_detector`] evaluates the triple sum at a
//! single `k` and is kept as a test oracle.

use crate::error::{MojoError, Result};
use crate::kernels::KernelSpec;
use crate::series::LaggedSeries;

/// Detector values over `k = G..=n-G` together with their parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorProfile {
    values: Vec<f64>,
    bandwidth: usize,
    lag: usize,
    kernel: KernelSpec,
}

impl DetectorProfile {
    /// Wraps precomputed values; `values[i]` is the statistic at `k = G + i`.
    pub fn from_values(
        values: Vec<f64>,
        bandwidth: usize,
        lag: usize,
        kernel: KernelSpec,
    ) -> Self {
        Self {
            values,
            bandwidth,
            lag,
            kernel,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// First location `k` covered by the profile.
    pub fn first_location(&self) -> usize {
        self.bandwidth
    }

    /// Last location `k` covered by the profile (`n - G`).
    pub fn last_location(&self) -> usize {
        self.bandwidth + self.values.len() - 1
    }

    /// Statistic at location `k`, if covered.
    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(self.bandwidth)
            .and_then(|i| self.values.get(i).copied())
    }

    /// `(k, value)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.bandwidth + i, *v))
    }

    /// Location of the global maximum; ties resolve to the smallest `k`.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        self.bandwidth + best
    }
}

/// Checks `G >= 2`, `G > lag` and `n >= 2G`, returning the block length `G - lag`.
pub(crate) fn check_window(ls: &LaggedSeries, bandwidth: usize) -> Result<usize> {
    let n = ls.source_len();
    let lag = ls.lag();
    if bandwidth < 2 {
        return Err(MojoError::config(format!(
            "bandwidth must be >= 2; got {bandwidth}"
        )));
    }
    if bandwidth <= lag {
        return Err(MojoError::config(format!(
            "bandwidth {bandwidth} must exceed the lag {lag}"
        )));
    }
    if n < 2 * bandwidth {
        return Err(MojoError::config(format!(
            "series length {n} is shorter than twice the bandwidth {bandwidth}"
        )));
    }
    Ok(bandwidth - lag)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn new(value: f64) -> Self {
        Self {
            sum: value,
            carry: 0.0,
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

struct CountingKernel<'a> {
    ls: &'a LaggedSeries,
    kernel: KernelSpec,
    evals: u64,
}

impl CountingKernel<'_> {
    #[inline]
    fn h(&mut self, s: usize, t: usize) -> f64 {
        self.evals += 1;
        self.kernel
            .eval_unchecked(self.ls.row(s), self.ls.row(t))
    }

    /// `sum_{t in range} h(s, t)`
    #[inline]
    fn row_sum(&mut self, s: usize, range: std::ops::Range<usize>) -> f64 {
        let mut acc = 0.0;
        for t in range {
            acc += self.h(s, t);
        }
        acc
    }
}

/// Computes the full detector profile by sequential updates.
pub fn detector_profile(
    ls: &LaggedSeries,
    bandwidth: usize,
    kernel: &KernelSpec,
) -> Result<DetectorProfile> {
    detector_profile_counted(ls, bandwidth, kernel).map(|(p, _)| p)
}

/// As [`detector_profile`], also returning the number of kernel evaluations.
pub fn detector_profile_counted(
    ls: &LaggedSeries,
    bandwidth: usize,
    kernel: &KernelSpec,
) -> Result<(DetectorProfile, u64)> {
    let m = check_window(ls, bandwidth)?;
    let g = bandwidth;
    let n = ls.source_len();
    let mut hk = CountingKernel {
        ls,
        kernel: *kernel,
        evals: 0,
    };

    // within[s] = sum_{i,j in [s, s+m)} h, for s in 0..=n-G
    let n_within = n - g + 1;
    let mut within = Vec::with_capacity(n_within);
    let mut acc = CompensatedSum::new({
        let mut w0 = 0.0;
        for i in 0..m {
            w0 += hk.h(i, i);
            for j in i + 1..m {
                w0 += 2.0 * hk.h(i, j);
            }
        }
        w0
    });
    within.push(acc.value());
    for s in 0..n_within - 1 {
        let out_diag = hk.h(s, s);
        let out_sum = out_diag + hk.row_sum(s, s + 1..s + m);
        let a = s + m;
        let in_diag = hk.h(a, a);
        let in_sum = in_diag + hk.row_sum(a, s + 1..a);
        acc.add(2.0 * (in_sum - out_sum) + out_diag - in_diag);
        within.push(acc.value());
    }

    // cross[s] = sum_{i in [s, s+m), j in [s+G, s+G+m)} h, for s in 0..=n-2G
    let n_prof = n - 2 * g + 1;
    let mut values = Vec::with_capacity(n_prof);
    let sign = kernel.sign().factor();
    let norm = sign / (m * m) as f64;
    let mut cross = CompensatedSum::new({
        let mut x0 = 0.0;
        for i in 0..m {
            x0 += hk.row_sum(i, g..g + m);
        }
        x0
    });
    for s in 0..n_prof {
        values.push(norm * (within[s] + within[s + g] - 2.0 * cross.value()));
        if s + 1 == n_prof {
            break;
        }
        let o = s;
        let a = s + m;
        let removed = hk.row_sum(o, s + g..s + g + m) + {
            let mut c = 0.0;
            for i in s..s + m {
                c += hk.h(i, o + g);
            }
            c
        } - hk.h(o, o + g);
        let added = hk.row_sum(a, s + 1 + g..s + 1 + g + m) + {
            let mut c = 0.0;
            for i in s + 1..s + 1 + m {
                c += hk.h(i, a + g);
            }
            c
        } - hk.h(a, a + g);
        cross.add(added - removed);
    }

    let evals = hk.evals;
    Ok((
        DetectorProfile::from_values(values, bandwidth, ls.lag(), *kernel),
        evals,
    ))
}

/// Evaluates `T_l(G, k)` at one location by the literal triple sum, `O(G^2)`.
pub fn direct_detector(
    ls: &LaggedSeries,
    bandwidth: usize,
    k: usize,
    kernel: &KernelSpec,
) -> Result<f64> {
    let m = check_window(ls, bandwidth)?;
    let n = ls.source_len();
    if k < bandwidth || k > n - bandwidth {
        return Err(MojoError::input(format!(
            "location {k} outside [{bandwidth}, {}]",
            n - bandwidth
        )));
    }
    // 1-based windows: left k-G+1..=k-l, right k+1..=k+G-l; row t is index t-1
    let left = (k - bandwidth)..(k - ls.lag());
    let right = k..(k + m);
    let h = |s: usize, t: usize| kernel.eval_unchecked(ls.row(s), ls.row(t));
    let mut within_left = 0.0;
    for s in left.clone() {
        for t in left.clone() {
            within_left += h(s, t);
        }
    }
    let mut within_right = 0.0;
    for s in right.clone() {
        for t in right.clone() {
            within_right += h(s, t);
        }
    }
    let mut cross = 0.0;
    for s in left.clone() {
        for t in right.clone() {
            cross += h(s, t);
        }
    }
    Ok(kernel.sign().factor() * (within_left + within_right - 2.0 * cross) / (m * m) as f64)
}
