// SPDX-License-Identifier: MIT OR Apache-2.0

//! Kernels induced by the characteristic-function weight functions.
//!
//! Each kernel turns the weighted L2 distance between two joint
//! characteristic functions into an expectation over pairs of lagged
//! observations:
//!
//! * [`KernelFamily::Gauss`]: `h1(x, y) = exp(-beta^2 |x - y|^2 / 2)`
//! * [`KernelFamily::QuadExp`]: `h2(x, y) = prod_r (2 delta - d_r^2) exp(-d_r^2 / (4 delta)) / (2 delta)`
//! * [`KernelFamily::Energy`]: `h3(x, y) = |x - y|^gamma`, `0 < gamma < 2`
//!
//! `h1` and `h2` are positive definite and the discrepancy is
//! `E[within] + E[within] - 2 E[cross]`; `h3` is conditionally negative
//! definite and the discrepancy flips sign. [`KernelSign`] carries the
//! convention so one detector code path serves all three.

use crate::error::{MojoError, Result};
use crate::series::LaggedSeries;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default number of pairs fed to the median heuristic.
pub const DEFAULT_MEDIAN_CAP: usize = 50_000;

/// Default exponent for the energy kernel.
pub const DEFAULT_ENERGY_GAMMA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// Gaussian kernel `h1`, scale `beta`.
    #[serde(rename = "h1")]
    Gauss,
    /// Quadratic-exponential kernel `h2`, scale `delta`.
    #[serde(rename = "h2")]
    QuadExp,
    /// Energy-distance kernel `h3`, exponent `gamma`.
    #[serde(rename = "h3")]
    Energy,
}

impl KernelFamily {
    pub fn sign(self) -> KernelSign {
        match self {
            Self::Energy => KernelSign::CrossMinusWithin,
            Self::Gauss | Self::QuadExp => KernelSign::WithinMinusCross,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gauss => "h1",
            Self::QuadExp => "h2",
            Self::Energy => "h3",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = MojoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" | "gauss" | "gaussian" => Ok(Self::Gauss),
            "h2" | "quadexp" => Ok(Self::QuadExp),
            "h3" | "energy" => Ok(Self::Energy),
            _ => Err(MojoError::config(format!(
                "unknown kernel '{s}'; expected one of h1, h2, h3"
            ))),
        }
    }
}

/// Orientation of the two-sample discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSign {
    WithinMinusCross,
    CrossMinusWithin,
}

impl KernelSign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Self::WithinMinusCross => 1.0,
            Self::CrossMinusWithin => -1.0,
        }
    }
}

/// A validated kernel with its scale parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    scale: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(MojoError::config(format!(
                "kernel {family} requires a finite positive scale; got {scale}"
            )));
        }
        if family == KernelFamily::Energy && scale >= 2.0 {
            return Err(MojoError::config(format!(
                "energy kernel exponent must lie in (0, 2); got {scale}"
            )));
        }
        Ok(Self { family, scale })
    }

    pub fn gauss(beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Gauss, beta)
    }

    pub fn quad_exp(delta: f64) -> Result<Self> {
        Self::new(KernelFamily::QuadExp, delta)
    }

    pub fn energy(gamma: f64) -> Result<Self> {
        Self::new(KernelFamily::Energy, gamma)
    }

    /// Builds the kernel whose scale follows from a median-heuristic value
    /// `delta_med` (half the median squared distance).
    ///
    /// `h2` uses `delta_med` directly and `h1` uses `beta^2 = 1 / (2 delta_med)`
    /// so that both Gaussian-type exponents read `-|d|^2 / (4 delta_med)`.
    /// The energy kernel has no length scale and keeps [`DEFAULT_ENERGY_GAMMA`].
    pub fn from_median(family: KernelFamily, delta_med: f64) -> Result<Self> {
        match family {
            KernelFamily::QuadExp => Self::quad_exp(delta_med),
            KernelFamily::Gauss => Self::gauss((1.0 / (2.0 * delta_med)).sqrt()),
            KernelFamily::Energy => Self::energy(DEFAULT_ENERGY_GAMMA),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sign(&self) -> KernelSign {
        self.family.sign()
    }

    /// Evaluates the kernel, checking that both points share a dimension.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(MojoError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.is_empty() {
            return Err(MojoError::input("kernel arguments must be non-empty"));
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// Evaluates the kernel without validating dimensions.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Gauss => {
                let sq = squared_distance(x, y);
                (-0.5 * self.scale * self.scale * sq).exp()
            }
            KernelFamily::QuadExp => {
                // prod_r (1 - d_r^2 / 2delta) * exp(-sum_r d_r^2 / 4delta)
                let two_delta = 2.0 * self.scale;
                let mut poly = 1.0;
                let mut sq = 0.0;
                for (a, b) in x.iter().zip(y) {
                    let d2 = (a - b) * (a - b);
                    poly *= 1.0 - d2 / two_delta;
                    sq += d2;
                }
                poly * (-sq / (2.0 * two_delta)).exp()
            }
            KernelFamily::Energy => {
                let sq = squared_distance(x, y);
                if self.scale == 1.0 {
                    sq.sqrt()
                } else {
                    sq.powf(0.5 * self.scale)
                }
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(scale={})", self.family, self.scale)
    }
}

#[inline]
pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Median heuristic for the kernel scale.
///
/// Returns half the lower median of `|Y_s - Y_t|^2` over all pairs with
/// `0 < |s - t| <= 2G - lag`, i.e. every pair that enters some detector
/// window. When there are more than `cap` eligible pairs a uniform sample
/// (without replacement, seeded) of `cap` pairs is used instead.
pub fn median_trick(
    rows: &LaggedSeries,
    bandwidth: usize,
    cap: usize,
    seed: u64,
) -> Result<f64> {
    median_core(rows.len(), rows.lag(), bandwidth, cap, seed, |s, t| {
        squared_distance(rows.row(s), rows.row(t))
    })
}

/// [`median_trick`] over explicit rows, treated as already lag-stacked.
pub fn median_trick_rows(
    rows: &[Vec<f64>],
    lag: usize,
    bandwidth: usize,
    cap: usize,
    seed: u64,
) -> Result<f64> {
    median_core(rows.len(), lag, bandwidth, cap, seed, |s, t| {
        squared_distance(&rows[s], &rows[t])
    })
}

fn median_core(
    n_rows: usize,
    lag: usize,
    bandwidth: usize,
    cap: usize,
    seed: u64,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    if n_rows < 2 {
        return Err(MojoError::input(format!(
            "median heuristic needs at least 2 rows; got {n_rows}"
        )));
    }
    if cap == 0 {
        return Err(MojoError::config("median heuristic cap must be >= 1"));
    }
    let max_sep = (2 * bandwidth).saturating_sub(lag).min(n_rows - 1);
    if max_sep == 0 {
        return Err(MojoError::input(
            "median heuristic has no eligible pairs (2G - lag must be >= 1)",
        ));
    }
    // pairs with separation d: n_rows - d
    let total: usize = (1..=max_sep).map(|d| n_rows - d).sum();

    let mut dists: Vec<f64> = if total <= cap {
        let mut out = Vec::with_capacity(total);
        for d in 1..=max_sep {
            for s in 0..n_rows - d {
                out.push(dist(s, s + d));
            }
        }
        out
    } else {
        // cumulative pair counts by separation, for index -> (d, s) decoding
        let mut cum = Vec::with_capacity(max_sep + 1);
        cum.push(0usize);
        for d in 1..=max_sep {
            cum.push(cum[d - 1] + n_rows - d);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        index::sample(&mut rng, total, cap)
            .into_iter()
            .map(|idx| {
                let d = cum.partition_point(|&c| c <= idx);
                let s = idx - cum[d - 1];
                dist(s, s + d)
            })
            .collect()
    };

    let mid = (dists.len() - 1) / 2;
    let (_, median, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let delta = *median / 2.0;
    if delta <= 0.0 {
        return Err(MojoError::DegenerateScale { lag });
    }
    Ok(delta)
}
