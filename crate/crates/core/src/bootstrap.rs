// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dependent wild bootstrap for the detection threshold and importance scores.
//!
//! A replicate draws a Gaussian AR(1) multiplier sequence `W_1..W_{n-G}` with
//! unit variance and coefficient `exp(-1/b_n)`, and recomputes the detector
//! with every kernel term weighted by window-centred multipliers. Both blocks
//! around `k` reuse the multipliers of the left block (`W_{t-G}` on the right),
//! so with `K(i, j) = h(i, j) + h(i+G, j+G) - h(i, j+G) - h(i+G, j)` the
//! replicate at window start `s` is the quadratic form
//!
//! ```text
//! T*(s) = sign / m^2 * sum_{i,j in [s, s+m)} (W_i - mean) (W_j - mean) K(i, j)
//!       = sign / m^2 * (A - 2 mean B + mean^2 C)
//! ```
//!
//! with `A = sum W_i W_j K`, `B = sum W_i K`, `C = sum K`. All three slide
//! along `s` in `O(m)` per step.

use crate::detector::{check_window, CompensatedSum};
use crate::error::{MojoError, Result};
use crate::kernels::KernelSpec;
use crate::rng::substream;
use crate::series::LaggedSeries;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_REPS: usize = 499;
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Band entries above which the difference kernel is recomputed on the fly
/// instead of cached (2^26 doubles, 512 MiB).
const BAND_CACHE_LIMIT: usize = 1 << 26;

/// Recommended multiplier dependence, `b_n = 1.5 n^(1/3)`.
pub fn default_block_param(n: usize) -> f64 {
    1.5 * (n as f64).cbrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub reps: usize,
    pub alpha: f64,
    /// `b_n`; the AR coefficient of the multipliers is `exp(-1 / b_n)`.
    pub block_param: f64,
    pub master_seed: u64,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub threads: usize,
}

impl BootstrapConfig {
    /// Defaults for a series of length `n`: `R = 499`, `alpha = 0.1`,
    /// `b_n = 1.5 n^(1/3)`.
    pub fn for_length(n: usize) -> Self {
        Self {
            reps: DEFAULT_REPS,
            alpha: DEFAULT_ALPHA,
            block_param: default_block_param(n),
            master_seed: 0,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(MojoError::config("bootstrap reps must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(MojoError::config(format!(
                "alpha must lie in (0, 1]; got {}",
                self.alpha
            )));
        }
        if !(self.block_param > 0.0 && self.block_param.is_finite()) {
            return Err(MojoError::config(format!(
                "b_n must be finite and positive; got {}",
                self.block_param
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// `T^[r] = max_k T^[r](G, k)` for `r = 1..R`, in replicate order.
    pub replicates: Vec<f64>,
    pub threshold: f64,
}

/// Gaussian AR(1) multipliers with unit marginal variance.
pub fn generate_multipliers<R: Rng + ?Sized>(len: usize, block_param: f64, rng: &mut R) -> Vec<f64> {
    let a = (-1.0 / block_param).exp();
    let innov = (1.0 - a * a).sqrt();
    let mut out = Vec::with_capacity(len);
    let mut w: f64 = rng.sample(StandardNormal);
    for t in 0..len {
        if t > 0 {
            let e: f64 = rng.sample(StandardNormal);
            w = a * w + innov * e;
        }
        out.push(w);
    }
    out
}

/// 1-based rank of the order statistic used as the `(1 - alpha)` quantile.
pub fn quantile_rank(reps: usize, alpha: f64) -> usize {
    let x = (1.0 - alpha) * reps as f64;
    // guard against 0.9 * 10 = 9.000000000000002
    let rank = (x - 1e-9).ceil();
    (rank.max(1.0) as usize).min(reps)
}

/// `(1 - alpha)` quantile as the `ceil((1 - alpha) R)`-th order statistic.
pub fn order_statistic_threshold(replicates: &[f64], alpha: f64) -> f64 {
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[quantile_rank(sorted.len(), alpha) - 1]
}

/// Fraction of replicates that `stat` meets or exceeds.
pub fn importance_score(stat: f64, replicates: &[f64]) -> f64 {
    if replicates.is_empty() {
        return 0.0;
    }
    replicates.iter().filter(|r| stat >= **r).count() as f64 / replicates.len() as f64
}

trait DiffKernel: Sync {
    fn get(&self, i: usize, j: usize) -> f64;
    /// `sum_{d < m} w[s + d] K(s, s + d)`
    fn forward_dot(&self, s: usize, w: &[f64]) -> f64;
    /// `sum_{e < m} w[a - m + 1 + e] K(a - m + 1 + e, a)`
    fn backward_dot(&self, a: usize, w: &[f64]) -> f64;
}

struct OnTheFly<'a> {
    ls: &'a LaggedSeries,
    kernel: KernelSpec,
    g: usize,
    m: usize,
}

impl OnTheFly<'_> {
    #[inline]
    fn h(&self, s: usize, t: usize) -> f64 {
        self.kernel.eval_unchecked(self.ls.row(s), self.ls.row(t))
    }
}

impl DiffKernel for OnTheFly<'_> {
    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let g = self.g;
        self.h(i, j) + self.h(i + g, j + g) - self.h(i, j + g) - self.h(i + g, j)
    }

    fn forward_dot(&self, s: usize, w: &[f64]) -> f64 {
        (0..self.m).map(|d| w[s + d] * self.get(s, s + d)).sum()
    }

    fn backward_dot(&self, a: usize, w: &[f64]) -> f64 {
        let start = a + 1 - self.m;
        (0..self.m).map(|e| w[start + e] * self.get(start + e, a)).sum()
    }
}

/// Cached band of the difference kernel, stored twice so both sliding dot
/// products read contiguous memory.
struct Band {
    m: usize,
    /// `fwd[i * m + d] = K(i, i + d)`
    fwd: Vec<f64>,
    /// `bwd[a * m + e] = K(a - m + 1 + e, a)`
    bwd: Vec<f64>,
}

impl Band {
    fn build(src: &OnTheFly<'_>, width: usize) -> Self {
        let m = src.m;
        let mut fwd = vec![0.0; width * m];
        for i in 0..width {
            for d in 0..m.min(width - i) {
                fwd[i * m + d] = src.get(i, i + d);
            }
        }
        let mut bwd = vec![0.0; width * m];
        for a in 0..width {
            for e in 0..m {
                if a + 1 + e >= m {
                    let i = a + 1 + e - m;
                    bwd[a * m + e] = fwd[i * m + (a - i)];
                }
            }
        }
        Self { m, fwd, bwd }
    }
}

impl DiffKernel for Band {
    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.fwd[lo * self.m + (hi - lo)]
    }

    #[inline]
    fn forward_dot(&self, s: usize, w: &[f64]) -> f64 {
        let row = &self.fwd[s * self.m..(s + 1) * self.m];
        dot(row, &w[s..s + self.m])
    }

    #[inline]
    fn backward_dot(&self, a: usize, w: &[f64]) -> f64 {
        let row = &self.bwd[a * self.m..(a + 1) * self.m];
        dot(row, &w[a + 1 - self.m..a + 1])
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four lanes so the compiler can vectorise without reassociation flags
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Multiplier-independent quantities shared by every replicate of one lag.
struct Plan<K> {
    kernel: K,
    m: usize,
    /// number of window starts, `n - 2G + 1`
    starts: usize,
    /// length of the multiplier sequence, `n - G`
    w_len: usize,
    sign: f64,
    /// `sum_{j in I_s} K(s, j)` for each step `s -> s + 1`
    out_sums: Vec<f64>,
    /// `sum_{j in I_{s+1}} K(s + m, j)`
    in_sums: Vec<f64>,
    /// `C(0)`
    c0: f64,
}

impl<K: DiffKernel> Plan<K> {
    fn new(kernel: K, m: usize, starts: usize, w_len: usize, sign: f64) -> Self {
        let ones = vec![1.0; w_len];
        let mut out_sums = Vec::with_capacity(starts.saturating_sub(1));
        let mut in_sums = Vec::with_capacity(starts.saturating_sub(1));
        for s in 0..starts - 1 {
            out_sums.push(kernel.forward_dot(s, &ones));
            in_sums.push(kernel.backward_dot(s + m, &ones));
        }
        let mut c0 = 0.0;
        for i in 0..m {
            c0 += kernel.get(i, i);
            for j in i + 1..m {
                c0 += 2.0 * kernel.get(i, j);
            }
        }
        Self {
            kernel,
            m,
            starts,
            w_len,
            sign,
            out_sums,
            in_sums,
            c0,
        }
    }

    fn replicate(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.w_len);
        let m = self.m;
        let mut a0 = 0.0;
        let mut b0 = 0.0;
        for i in 0..m {
            let kii = self.kernel.get(i, i);
            a0 += w[i] * w[i] * kii;
            b0 += w[i] * kii;
            for j in i + 1..m {
                let kij = self.kernel.get(i, j);
                a0 += 2.0 * w[i] * w[j] * kij;
                b0 += (w[i] + w[j]) * kij;
            }
        }
        let mut a = CompensatedSum::new(a0);
        let mut b = CompensatedSum::new(b0);
        let mut c = CompensatedSum::new(self.c0);
        let mut wsum = CompensatedSum::new(w[..m].iter().sum());
        let inv_m = 1.0 / m as f64;
        let norm = self.sign * inv_m * inv_m;
        let mut best = f64::NEG_INFINITY;
        for s in 0..self.starts {
            let mu = wsum.value() * inv_m;
            let (av, bv, cv) = (a.value(), b.value(), c.value());
            let stat = norm * (av - 2.0 * mu * bv + mu * mu * cv);
            if stat > best {
                best = stat;
            }
            if s + 1 == self.starts {
                break;
            }
            let o = s;
            let in_idx = s + m;
            let k_oo = self.kernel.get(o, o);
            let k_aa = self.kernel.get(in_idx, in_idx);
            let (wo, wa) = (w[o], w[in_idx]);
            let sw_out = self.kernel.forward_dot(o, w);
            let sw_in = self.kernel.backward_dot(in_idx, w);
            let (s_out, s_in) = (self.out_sums[s], self.in_sums[s]);
            a.add(-2.0 * wo * sw_out + wo * wo * k_oo + 2.0 * wa * sw_in - wa * wa * k_aa);
            b.add(-(wo * s_out + sw_out - wo * k_oo) + (wa * s_in + sw_in - wa * k_aa));
            c.add(-2.0 * s_out + k_oo + 2.0 * s_in - k_aa);
            wsum.add(wa - wo);
        }
        best
    }
}

fn with_plan<T>(
    ls: &LaggedSeries,
    bandwidth: usize,
    kernel: &KernelSpec,
    f: impl FnOnce(&(dyn Fn(&[f64]) -> f64 + Sync), usize) -> T,
) -> Result<T> {
    let m = check_window(ls, bandwidth)?;
    let n = ls.source_len();
    let starts = n - 2 * bandwidth + 1;
    let w_len = n - bandwidth;
    // indices touched by any window: [0, n - G - lag)
    let width = n - bandwidth - ls.lag();
    let src = OnTheFly {
        ls,
        kernel: *kernel,
        g: bandwidth,
        m,
    };
    let sign = kernel.sign().factor();
    if width.saturating_mul(m) <= BAND_CACHE_LIMIT {
        let band = Band::build(&src, width);
        let plan = Plan::new(band, m, starts, w_len, sign);
        Ok(f(&|w| plan.replicate(w), w_len))
    } else {
        let plan = Plan::new(src, m, starts, w_len, sign);
        Ok(f(&|w| plan.replicate(w), w_len))
    }
}

/// Maximum over `k` of the multiplier-weighted detector for one multiplier
/// sequence `w` of length `n - G`.
pub fn bootstrap_replicate(
    ls: &LaggedSeries,
    bandwidth: usize,
    kernel: &KernelSpec,
    w: &[f64],
) -> Result<f64> {
    check_window(ls, bandwidth)?;
    let expected = ls.source_len() - bandwidth;
    if w.len() != expected {
        return Err(MojoError::DimensionMismatch {
            expected,
            got: w.len(),
        });
    }
    with_plan(ls, bandwidth, kernel, |rep, _| rep(w))
}

/// Runs `R` independent replicates and returns them with the threshold.
///
/// Replicate `r` draws its multipliers from substream `r` of
/// `cfg.master_seed`, so the output is identical for any thread count.
pub fn run_bootstrap(
    ls: &LaggedSeries,
    bandwidth: usize,
    kernel: &KernelSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    cfg.validate()?;
    let replicates = with_plan(ls, bandwidth, kernel, |rep, w_len| {
        let job = || -> Vec<f64> {
            (0..cfg.reps)
                .into_par_iter()
                .map(|r| {
                    let mut rng = substream(cfg.master_seed, r as u64);
                    let w = generate_multipliers(w_len, cfg.block_param, &mut rng);
                    rep(&w)
                })
                .collect()
        };
        run_in_pool(cfg.threads, job)
    })??;
    let threshold = order_statistic_threshold(&replicates, cfg.alpha);
    Ok(BootstrapResult {
        replicates,
        threshold,
    })
}

/// Runs `job` on a dedicated pool of `threads` workers, or on the ambient
/// pool when `threads == 0`.
pub(crate) fn run_in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| MojoError::config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}
