// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded piecewise-stationary data generators and the scenario catalog.
//!
//! All segments of one series read a single innovation source: the draws at
//! time `t` come from substream `t` of the series seed, whatever law the
//! segment applies to them. Each segment's recursion is started
//! [`BURN_IN`] steps before its first time point and only its own stretch is
//! kept, so every segment begins close to its stationary law. When the
//! dynamics do not change across a boundary the burn-in reproduces the
//! preceding segment's path.

use crate::error::{MojoError, Result};
use crate::rng::{derive_seed, substream};
use crate::segment::Segmentation;
use crate::series::TimeSeries;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Bernoulli, ChiSquared, Distribution, Exp, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Steps simulated and discarded before each segment.
pub const BURN_IN: usize = 500;

const TAG_SIMULATE: u64 = 0x7369_6d75;

/// Marginal law of one innovation coordinate before location/scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    Normal,
    StudentT { df: f64 },
    ChiSquared { k: f64 },
    /// Exponential with the given rate (mean `1 / rate`).
    Exponential { rate: f64 },
    Bernoulli { prob: f64 },
}

/// `loc + scale * Z` with `Z` drawn from `law`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Innovation {
    pub law: Law,
    pub loc: f64,
    pub scale: f64,
}

impl Innovation {
    pub fn new(law: Law, loc: f64, scale: f64) -> Self {
        Self { law, loc, scale }
    }

    pub fn standard_normal() -> Self {
        Self::new(Law::Normal, 0.0, 1.0)
    }

    pub fn normal(mean: f64, sd: f64) -> Self {
        Self::new(Law::Normal, mean, sd)
    }

    pub fn student_t(df: f64) -> Self {
        Self::new(Law::StudentT { df }, 0.0, 1.0)
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            loc: self.loc * factor,
            scale: self.scale * factor,
            ..self
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        if !(self.loc.is_finite() && self.scale.is_finite() && self.scale >= 0.0) {
            return Err(MojoError::config(format!(
                "innovation location/scale must be finite with scale >= 0; got {self:?}"
            )));
        }
        let bad = |what: &str| MojoError::config(format!("invalid {what} in {self:?}"));
        Ok(match self.law {
            Law::Normal => Sampler::Normal,
            Law::StudentT { df } => {
                Sampler::StudentT(StudentT::new(df).map_err(|_| bad("degrees of freedom"))?)
            }
            Law::ChiSquared { k } => {
                Sampler::ChiSquared(ChiSquared::new(k).map_err(|_| bad("degrees of freedom"))?)
            }
            Law::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(bad("rate"));
                }
                Sampler::Exp(Exp::new(rate).map_err(|_| bad("rate"))?)
            }
            Law::Bernoulli { prob } => {
                Sampler::Bernoulli(Bernoulli::new(prob).map_err(|_| bad("probability"))?)
            }
        })
    }
}

enum Sampler {
    Normal,
    StudentT(StudentT<f64>),
    ChiSquared(ChiSquared<f64>),
    Exp(Exp<f64>),
    Bernoulli(Bernoulli),
}

impl Sampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Normal => rng.sample(StandardNormal),
            Self::StudentT(d) => d.sample(rng),
            Self::ChiSquared(d) => d.sample(rng),
            Self::Exp(d) => d.sample(rng),
            Self::Bernoulli(d) => f64::from(u8::from(d.sample(rng))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Garch {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// One stationary regime:
///
/// ```text
/// e_t = M v_t,  v_t[i] ~ innovation i
/// Y_t = sum_k A_k Y_{t-k} + e_t + sum_k B_k e_{t-k}     (linear)
/// Y_t = sigma_t e_t, sigma_t^2 = omega + alpha Y_{t-1}^2 + beta sigma_{t-1}^2
/// X_t = mean + Y_t
/// ```
///
/// The GARCH recursion acts coordinate-wise and excludes `ar` / `ma`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentProcess {
    pub dim: usize,
    /// One entry (shared by all coordinates) or `dim` entries.
    pub innovations: Vec<Innovation>,
    pub mix: Option<DMatrix<f64>>,
    pub ar: Vec<DMatrix<f64>>,
    pub ma: Vec<DMatrix<f64>>,
    pub garch: Option<Garch>,
    /// Empty for a zero mean.
    pub mean: Vec<f64>,
}

impl SegmentProcess {
    /// i.i.d. draws from `innovation` in every coordinate.
    pub fn iid(dim: usize, innovation: Innovation) -> Self {
        Self {
            dim,
            innovations: vec![innovation],
            mix: None,
            ar: Vec::new(),
            ma: Vec::new(),
            garch: None,
            mean: Vec::new(),
        }
    }

    pub fn gaussian(dim: usize) -> Self {
        Self::iid(dim, Innovation::standard_normal())
    }

    pub fn with_innovations(mut self, innovations: Vec<Innovation>) -> Self {
        self.innovations = innovations;
        self
    }

    /// Multiplies every innovation (location included) by `factor`.
    pub fn with_scale(mut self, factor: f64) -> Self {
        for inn in &mut self.innovations {
            *inn = inn.scaled(factor);
        }
        self
    }

    pub fn with_mix(mut self, mix: DMatrix<f64>) -> Self {
        self.mix = Some(mix);
        self
    }

    pub fn with_ar(mut self, ar: Vec<DMatrix<f64>>) -> Self {
        self.ar = ar;
        self
    }

    pub fn with_ma(mut self, ma: Vec<DMatrix<f64>>) -> Self {
        self.ma = ma;
        self
    }

    /// Univariate AR coefficients `a_1, a_2, ...`.
    pub fn with_ar_scalar(self, coefs: &[f64]) -> Self {
        self.with_ar(coefs.iter().map(|&a| DMatrix::from_element(1, 1, a)).collect())
    }

    /// Univariate MA coefficients `b_1, b_2, ...`.
    pub fn with_ma_scalar(self, coefs: &[f64]) -> Self {
        self.with_ma(coefs.iter().map(|&b| DMatrix::from_element(1, 1, b)).collect())
    }

    pub fn with_garch(mut self, omega: f64, alpha: f64, beta: f64) -> Self {
        self.garch = Some(Garch { omega, alpha, beta });
        self
    }

    pub fn with_mean(mut self, mean: Vec<f64>) -> Self {
        self.mean = mean;
        self
    }

    /// Checks shapes, innovation laws and stationarity.
    pub fn validate(&self) -> Result<()> {
        let p = self.dim;
        if p == 0 {
            return Err(MojoError::config("process dimension must be >= 1"));
        }
        if self.innovations.len() != 1 && self.innovations.len() != p {
            return Err(MojoError::DimensionMismatch {
                expected: p,
                got: self.innovations.len(),
            });
        }
        for inn in &self.innovations {
            inn.sampler()?;
        }
        let square = |m: &DMatrix<f64>| {
            if m.nrows() != p || m.ncols() != p {
                Err(MojoError::DimensionMismatch {
                    expected: p,
                    got: m.nrows().max(m.ncols()),
                })
            } else if m.iter().any(|v| !v.is_finite()) {
                Err(MojoError::config("coefficient matrices must be finite"))
            } else {
                Ok(())
            }
        };
        if let Some(m) = &self.mix {
            square(m)?;
        }
        for m in self.ar.iter().chain(&self.ma) {
            square(m)?;
        }
        if !self.mean.is_empty() && self.mean.len() != p {
            return Err(MojoError::DimensionMismatch {
                expected: p,
                got: self.mean.len(),
            });
        }
        if self.mean.iter().any(|v| !v.is_finite()) {
            return Err(MojoError::config("segment mean must be finite"));
        }
        if let Some(g) = &self.garch {
            if !self.ar.is_empty() || !self.ma.is_empty() {
                return Err(MojoError::config(
                    "GARCH segments cannot carry AR or MA terms",
                ));
            }
            if !(g.omega > 0.0 && g.alpha >= 0.0 && g.beta >= 0.0) {
                return Err(MojoError::config(format!(
                    "GARCH needs omega > 0 and alpha, beta >= 0; got {g:?}"
                )));
            }
            if g.alpha + g.beta >= 1.0 {
                return Err(MojoError::Nonstationary(format!(
                    "GARCH alpha + beta = {} >= 1",
                    g.alpha + g.beta
                )));
            }
        }
        let rho = ar_spectral_radius(&self.ar, p);
        if rho >= 1.0 - 1e-10 {
            return Err(MojoError::Nonstationary(format!(
                "AR companion matrix has spectral radius {rho:.6} (a root on or inside the unit circle)"
            )));
        }
        Ok(())
    }
}

/// Spectral radius of the companion matrix of a VAR with lag matrices `ar`.
pub fn ar_spectral_radius(ar: &[DMatrix<f64>], p: usize) -> f64 {
    let k = ar.len();
    if k == 0 {
        return 0.0;
    }
    let mut companion = DMatrix::<f64>::zeros(p * k, p * k);
    for (i, a) in ar.iter().enumerate() {
        companion.view_mut((0, i * p), (p, p)).copy_from(a);
    }
    for i in 0..p * (k - 1) {
        companion[(p + i, i)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Symmetric square root of a positive semi-definite matrix.
pub fn sqrtm_psd(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !sigma.is_square() {
        return Err(MojoError::config("covariance must be square"));
    }
    if (sigma - sigma.transpose()).amax() > 1e-12 {
        return Err(MojoError::config("covariance must be symmetric"));
    }
    let eig = sigma.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-12) {
        return Err(MojoError::config("covariance must be positive semi-definite"));
    }
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

/// A regime starting at 0-based time `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub start: usize,
    pub process: SegmentProcess,
}

impl Piece {
    pub fn new(start: usize, process: SegmentProcess) -> Self {
        Self { start, process }
    }
}

/// Generated data with its true segmentation.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSeries {
    pub data: TimeSeries,
    pub truth: Segmentation,
    /// For each lag, the 1-based indices of the change points visible at it.
    pub detectable_lags: Option<BTreeMap<usize, Vec<usize>>>,
}

/// Concatenates `pieces` (the first must start at 0) into a series of
/// length `n` driven by one innovation source derived from `seed`.
pub fn generate_custom(pieces: &[Piece], n: usize, seed: u64) -> Result<LabeledSeries> {
    generate_pieces(pieces, n, seed, BURN_IN)
}

fn generate_pieces(pieces: &[Piece], n: usize, seed: u64, burn_in: usize) -> Result<LabeledSeries> {
    if n == 0 {
        return Err(MojoError::config("series length must be >= 1"));
    }
    let first = pieces
        .first()
        .ok_or_else(|| MojoError::config("at least one segment is required"))?;
    if first.start != 0 {
        return Err(MojoError::config("the first segment must start at 0"));
    }
    let p = first.process.dim;
    for piece in pieces {
        piece.process.validate()?;
        if piece.process.dim != p {
            return Err(MojoError::DimensionMismatch {
                expected: p,
                got: piece.process.dim,
            });
        }
    }
    let changes: Vec<usize> = pieces[1..].iter().map(|pc| pc.start).collect();
    let truth = Segmentation::new(n, changes)?;

    let innov_seed = derive_seed(seed, &[TAG_SIMULATE]);
    let mut values = vec![0.0; n * p];
    for (piece, range) in pieces.iter().zip(truth.segments()) {
        // Shifted clock: `u = t + burn_in`, so burn-in indices stay >= 0.
        let out = &mut values[range.start * p..range.end * p];
        run_segment(&piece.process, innov_seed, range.start, range.end + burn_in, burn_in, out)?;
    }
    Ok(LabeledSeries {
        data: TimeSeries::new(values, n, p)?,
        truth,
        detectable_lags: None,
    })
}

fn run_segment(
    proc_: &SegmentProcess,
    innov_seed: u64,
    u_start: usize,
    u_end: usize,
    burn_in: usize,
    out: &mut [f64],
) -> Result<()> {
    let p = proc_.dim;
    let samplers = proc_
        .innovations
        .iter()
        .map(Innovation::sampler)
        .collect::<Result<Vec<_>>>()?;
    let mut y_hist: Vec<DVector<f64>> = vec![DVector::zeros(p); proc_.ar.len()];
    let mut e_hist: Vec<DVector<f64>> = vec![DVector::zeros(p); proc_.ma.len()];
    let mut sigma2 = proc_
        .garch
        .map(|g| vec![g.omega / (1.0 - g.alpha - g.beta); p])
        .unwrap_or_default();
    let mut y_prev = DVector::<f64>::zeros(p);
    let mut v = DVector::<f64>::zeros(p);

    for u in u_start..u_end {
        let mut rng = substream(innov_seed, u as u64);
        for i in 0..p {
            let k = if proc_.innovations.len() == 1 { 0 } else { i };
            let inn = &proc_.innovations[k];
            v[i] = inn.loc + inn.scale * samplers[k].draw(&mut rng);
        }
        let e = match &proc_.mix {
            Some(m) => m * &v,
            None => v.clone(),
        };
        let y = if let Some(g) = &proc_.garch {
            let mut y = DVector::zeros(p);
            for i in 0..p {
                sigma2[i] = g.omega + g.alpha * y_prev[i] * y_prev[i] + g.beta * sigma2[i];
                y[i] = sigma2[i].sqrt() * e[i];
            }
            y
        } else {
            let mut y = e.clone();
            for (b, past) in proc_.ma.iter().zip(&e_hist) {
                y += b * past;
            }
            for (a, past) in proc_.ar.iter().zip(&y_hist) {
                y += a * past;
            }
            y
        };
        if !e_hist.is_empty() {
            e_hist.rotate_right(1);
            e_hist[0] = e;
        }
        if !y_hist.is_empty() {
            y_hist.rotate_right(1);
            y_hist[0] = y.clone();
        }
        if u >= u_start + burn_in {
            let t = u - u_start - burn_in;
            for i in 0..p {
                let mu = proc_.mean.get(i).copied().unwrap_or(0.0);
                out[t * p + i] = mu + y[i];
            }
        }
        y_prev = y;
    }
    Ok(())
}

macro_rules! scenario_ids {
    ($($id:ident),* $(,)?) => {
        /// Catalog scenario identifiers.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[allow(non_camel_case_types)]
        pub enum ScenarioId {
            $($id,)*
            Example1,
            Custom,
        }

        impl ScenarioId {
            /// Every catalog scenario (excludes `Custom`).
            pub const CATALOG: &'static [ScenarioId] = &[$(ScenarioId::$id,)* ScenarioId::Example1];

            pub fn name(self) -> &'static str {
                match self {
                    $(ScenarioId::$id => stringify!($id),)*
                    ScenarioId::Example1 => "EXAMPLE1",
                    ScenarioId::Custom => "CUSTOM",
                }
            }
        }
    };
}

scenario_ids!(
    N1, N2, N3, N4, N5, N6, N7, A1, A2, A3, A4, A5, B1, B2, B3, B4, B5, B6, C1, C2, C3, C4, C5,
    C6, D1, D2, D3, D4, M1, M2, M3, M4, M5, M6, M7, M8, M9,
);

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = MojoError;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        if up == "CUSTOM" {
            return Ok(Self::Custom);
        }
        Self::CATALOG
            .iter()
            .copied()
            .find(|id| id.name() == up)
            .ok_or_else(|| MojoError::UnknownScenario(s.to_string()))
    }
}

/// Request for a catalog series.
///
/// Recognised overrides: `changes` (replacement change points, same count as
/// the catalog, in the target `n`) and `burn_in` (one value).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub overrides: BTreeMap<String, Vec<f64>>,
}

impl ScenarioSpec {
    pub fn new(id: ScenarioId, n: usize, seed: u64) -> Self {
        Self {
            id,
            n,
            seed,
            overrides: BTreeMap::new(),
        }
    }

    /// The catalog's own sample size.
    pub fn reference_length(id: ScenarioId) -> usize {
        use ScenarioId::*;
        match id {
            M4 | M5 | M6 => 2000,
            M7 | M8 | M9 => 10_000,
            _ => 1000,
        }
    }

    pub fn default_for(id: ScenarioId, seed: u64) -> Self {
        Self::new(id, Self::reference_length(id), seed)
    }
}

struct Catalog {
    changes: Vec<usize>,
    processes: Vec<SegmentProcess>,
    detectable: Option<BTreeMap<usize, Vec<usize>>>,
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn equicorrelated(p: usize, diag: f64, off: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| if i == j { diag } else { off })
}

fn toeplitz(p: usize, rho: f64, shift: i32) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32 + shift))
}

fn with_means(base: &SegmentProcess, means: &[Vec<f64>]) -> Vec<SegmentProcess> {
    means
        .iter()
        .map(|mu| base.clone().with_mean(mu.clone()))
        .collect()
}

fn scalar_means(base: &SegmentProcess, means: &[f64]) -> Vec<SegmentProcess> {
    with_means(base, &means.iter().map(|&m| vec![m]).collect::<Vec<_>>())
}

fn covariances(p: usize, inn: Innovation, sigmas: &[DMatrix<f64>]) -> Result<Vec<SegmentProcess>> {
    sigmas
        .iter()
        .map(|s| Ok(SegmentProcess::iid(p, inn).with_mix(sqrtm_psd(s)?)))
        .collect()
}

fn catalog(id: ScenarioId) -> Result<Catalog> {
    use ScenarioId::*;
    let g1 = SegmentProcess::gaussian(1);
    let quarter = vec![250, 500, 750];
    let thirds = vec![333, 667];
    let t5_unit = Innovation::student_t(5.0).scaled(1.0 / (5.0f64 / 3.0).sqrt());
    let t25 = Innovation::student_t(2.5).scaled(1.0 / 5.0f64.sqrt());
    let ar1_unit = g1.clone().with_ar_scalar(&[0.7]).with_scale(0.51f64.sqrt());
    let ma4 = [0.9, 0.8, 0.7, 0.6];
    let ma4_unit = g1.clone().with_ma_scalar(&ma4).with_scale(1.0 / 3.3f64.sqrt());
    let a_means = [0.0, 1.0, 0.0, 1.0];
    let m1_noise = g1.clone().with_ar_scalar(&[0.3]).with_scale(0.91f64.sqrt());
    let single = |proc_: SegmentProcess| (Vec::new(), vec![proc_]);

    let (changes, processes) = match id {
        N1 => single(g1.clone()),
        N2 => single(SegmentProcess::iid(1, Innovation::student_t(5.0))),
        N3 => single(g1.clone().with_ar_scalar(&[0.7])),
        N4 => single(g1.clone().with_ma_scalar(&ma4)),
        N5 => single(g1.clone().with_garch(0.5, 0.4, 0.0)),
        N6 => single(SegmentProcess::gaussian(2).with_ar(vec![m2(0.4, -0.2, -0.2, 0.4)])),
        N7 => single(SegmentProcess::gaussian(5).with_ar(vec![toeplitz(5, 0.3, 1)])),
        A1 => (quarter, scalar_means(&g1, &a_means)),
        A2 => (quarter, scalar_means(&SegmentProcess::iid(1, t5_unit), &a_means)),
        A3 => (quarter, scalar_means(&ar1_unit, &a_means)),
        A4 => (quarter, scalar_means(&ma4_unit, &a_means)),
        A5 => {
            let delta: Vec<f64> = (0..10).map(|i| if i < 5 { 0.5 } else { 0.0 }).collect();
            let zero = vec![0.0; 10];
            let means = [zero.clone(), delta.clone(), zero, delta];
            (quarter, with_means(&SegmentProcess::gaussian(10), &means))
        }
        B1 | B2 => {
            let base = if id == B1 {
                g1.clone()
            } else {
                SegmentProcess::iid(1, t5_unit)
            };
            let procs = [0.5, 1.0, 0.5, 1.0]
                .iter()
                .map(|&s| base.clone().with_scale(s))
                .collect();
            (quarter, procs)
        }
        B3 => {
            let procs = [1.0, 2.0, 1.0, 2.0]
                .iter()
                .map(|&s| g1.clone().with_ar_scalar(&[0.4]).with_scale(s))
                .collect();
            (quarter, procs)
        }
        B4 | B5 => {
            let inn = if id == B4 {
                Innovation::standard_normal()
            } else {
                Innovation::student_t(5.0)
            };
            let i2 = DMatrix::identity(2, 2);
            let s1 = m2(1.0, 0.9, 0.9, 1.0);
            (quarter, covariances(2, inn, &[i2.clone(), s1.clone(), i2, s1])?)
        }
        B6 => {
            let i5 = DMatrix::identity(5, 5);
            let s1 = toeplitz(5, 0.7, 0);
            let inn = Innovation::standard_normal();
            (quarter, covariances(5, inn, &[i5.clone(), s1.clone(), i5, s1])?)
        }
        C1 => {
            let procs = [-0.8, 0.8, -0.8]
                .iter()
                .map(|&a| g1.clone().with_ar_scalar(&[a]))
                .collect();
            (thirds, procs)
        }
        C2 => {
            let procs = [-0.7, 0.7, -0.7]
                .iter()
                .map(|&b| g1.clone().with_ma_scalar(&[0.0, b]))
                .collect();
            (thirds, procs)
        }
        C3 => (
            vec![500],
            vec![
                g1.clone().with_garch(0.01, 0.7, 0.2),
                g1.clone().with_garch(0.01, 0.2, 0.7),
            ],
        ),
        C4 => {
            let a0 = m2(0.5, 0.1, 0.1, 0.5);
            let a1 = m2(-0.5, 0.1, 0.1, -0.5);
            let g2 = SegmentProcess::gaussian(2);
            let procs = [a0.clone(), a1, a0]
                .into_iter()
                .map(|a| g2.clone().with_ar(vec![a]))
                .collect();
            (thirds, procs)
        }
        C5 | C6 => {
            let p = if id == C5 { 2 } else { 5 };
            let b0 = equicorrelated(p, 1.0, 0.1);
            let b1 = equicorrelated(p, -1.0, 0.1);
            let gp = SegmentProcess::gaussian(p);
            let procs = [b0.clone(), b1, b0]
                .into_iter()
                .map(|b| gp.clone().with_ma(vec![b]))
                .collect();
            (thirds, procs)
        }
        D1 => {
            let alt = SegmentProcess::iid(1, t25);
            (thirds, vec![g1.clone(), alt, g1.clone()])
        }
        D2 => {
            let c = 1.0 / (2.0 * 2.0f64.sqrt());
            let chi = SegmentProcess::iid(1, Innovation::new(Law::ChiSquared { k: 1.0 }, 0.5 - c, c));
            let norm = SegmentProcess::iid(1, Innovation::normal(0.5, 0.5));
            (thirds, vec![chi.clone(), norm, chi])
        }
        D3 => {
            let norm = SegmentProcess::iid(1, Innovation::normal(0.0, 0.5)).with_ar_scalar(&[0.4]);
            let exp = SegmentProcess::iid(1, Innovation::new(Law::Exponential { rate: 2.0 }, -0.5, 1.0))
                .with_ar_scalar(&[0.4]);
            (thirds, vec![norm.clone(), exp, norm])
        }
        D4 => {
            let g10 = SegmentProcess::gaussian(10);
            let mut inns = vec![Innovation::standard_normal(); 3];
            inns.extend(std::iter::repeat(t25).take(7));
            let alt = g10.clone().with_innovations(inns);
            (thirds, vec![g10.clone(), alt, g10])
        }
        M1 => (vec![80, 250, 600], scalar_means(&m1_noise, &[0.0, 1.6, 0.6, 1.2])),
        M2 => {
            let procs = [0.3, 0.8, -0.8]
                .iter()
                .map(|&a| g1.clone().with_ar_scalar(&[a]))
                .collect();
            (vec![500, 900], procs)
        }
        M3 => {
            let b_pos = m2(1.0, 0.1, 0.1, 1.0);
            let b_neg = m2(-1.0, 0.1, 0.1, -1.0);
            let g2 = SegmentProcess::gaussian(2);
            let procs = [(0.0, b_pos.clone()), (0.7, b_pos), (0.7, b_neg)]
                .into_iter()
                .map(|(mu, b)| g2.clone().with_ma(vec![b]).with_mean(vec![mu; 2]))
                .collect();
            (vec![150, 500], procs)
        }
        M4 => (
            vec![500, 1000, 1150, 1550, 1900],
            scalar_means(&m1_noise, &[0.0, 0.9, 2.2, 1.1, 0.0, 1.5]),
        ),
        M5 => {
            let mean_changes = [100, 200, 600, 1400];
            let means = [0.0, 1.5, 0.0, 0.9, -0.3];
            let ar_changes = [1000, 1800];
            let ars = [-0.7, 0.7, -0.8];
            let mut changes: Vec<usize> = mean_changes.iter().chain(&ar_changes).copied().collect();
            changes.sort_unstable();
            let regime = |cps: &[usize], t: usize| cps.iter().filter(|&&c| c <= t).count();
            let procs = std::iter::once(0)
                .chain(changes.iter().copied())
                .map(|start| {
                    g1.clone()
                        .with_ar_scalar(&[ars[regime(&ar_changes, start)]])
                        .with_mean(vec![means[regime(&mean_changes, start)]])
                })
                .collect();
            (changes, procs)
        }
        M6 => {
            let s = |r: f64| m2(1.0, r, r, 1.0);
            let sigmas = [s(0.0), s(0.6), s(-0.6), s(0.6), s(-0.2), s(0.6)];
            (
                vec![150, 300, 800, 1300, 1600],
                covariances(2, Innovation::standard_normal(), &sigmas)?,
            )
        }
        M7 => (
            vec![1000, 2000, 2150, 2800, 3650, 4650, 5150, 5550],
            scalar_means(&g1, &[0.0, 1.0, 2.6, 1.1, 0.0, 1.0, -0.2, 1.0, 0.0]),
        ),
        M8 => {
            let a = [0.8, -0.8, 0.8, -0.2, -0.2, -0.2];
            let b = [-0.2, -0.2, -0.2, 0.6, -0.6, 0.6];
            let procs = a
                .iter()
                .zip(&b)
                .map(|(&a, &b)| g1.clone().with_ar_scalar(&[a, b]))
                .collect();
            (vec![1000, 1400, 5000, 9000, 9400], procs)
        }
        M9 => {
            let b_a = m2(-1.0, 0.4, 0.5, -1.0);
            let b_b = m2(1.0, 0.4, 0.4, 1.0);
            let b_c = m2(1.8, 0.1, 0.1, 1.8);
            let g2 = SegmentProcess::gaussian(2);
            let procs = [&b_a, &b_b, &b_a, &b_b, &b_c, &b_b, &b_a]
                .into_iter()
                .map(|b| g2.clone().with_ma(vec![b.clone()]))
                .collect();
            (vec![600, 2000, 4000, 5300, 5600, 8000], procs)
        }
        Example1 => return Ok(example1_catalog()),
        Custom => {
            return Err(MojoError::config(
                "CUSTOM scenarios are built with generate_custom",
            ))
        }
    };
    let detectable = match id {
        C2 => Some(BTreeMap::from([(0, vec![]), (1, vec![]), (2, vec![1, 2])])),
        _ => None,
    };
    Ok(Catalog {
        changes,
        processes,
        detectable,
    })
}

/// Segment processes of the two-change illustration: a mean shift of 0.7
/// at 300 and an AR(1) sign flip (0.5 to -0.5) at 650, unit variance.
pub fn example1_pieces() -> Vec<Piece> {
    let ar = |a: f64, mu: f64| {
        SegmentProcess::gaussian(1)
            .with_ar_scalar(&[a])
            .with_scale(0.75f64.sqrt())
            .with_mean(vec![mu])
    };
    vec![
        Piece::new(0, ar(0.5, 0.0)),
        Piece::new(300, ar(0.5, 0.7)),
        Piece::new(650, ar(-0.5, 0.7)),
    ]
}

fn example1_catalog() -> Catalog {
    let pieces = example1_pieces();
    Catalog {
        changes: pieces[1..].iter().map(|p| p.start).collect(),
        processes: pieces.into_iter().map(|p| p.process).collect(),
        detectable: Some(BTreeMap::from([(0, vec![1]), (1, vec![1, 2])])),
    }
}

/// Generates a catalog scenario.
pub fn generate(spec: &ScenarioSpec) -> Result<LabeledSeries> {
    if spec.n < 10 {
        return Err(MojoError::config(format!("n must be >= 10; got {}", spec.n)));
    }
    let cat = catalog(spec.id)?;
    let n_ref = ScenarioSpec::reference_length(spec.id);
    let mut changes: Vec<usize> = cat
        .changes
        .iter()
        .map(|&c| ((c as u128 * spec.n as u128) / n_ref as u128) as usize)
        .collect();
    let mut burn_in = BURN_IN;
    for (key, vals) in &spec.overrides {
        match key.as_str() {
            "changes" => {
                if vals.len() != changes.len() {
                    return Err(MojoError::config(format!(
                        "override 'changes' needs {} values for {}; got {}",
                        changes.len(),
                        spec.id,
                        vals.len()
                    )));
                }
                changes = vals
                    .iter()
                    .map(|&v| as_index(v, "changes"))
                    .collect::<Result<_>>()?;
            }
            "burn_in" => match vals.as_slice() {
                [v] => burn_in = as_index(*v, "burn_in")?,
                _ => return Err(MojoError::config("override 'burn_in' takes one value")),
            },
            other => {
                return Err(MojoError::config(format!("unknown override '{other}'")));
            }
        }
    }
    if changes.windows(2).any(|w| w[0] >= w[1]) || changes.iter().any(|&c| c == 0 || c >= spec.n)
    {
        return Err(MojoError::config(format!(
            "change points {changes:?} are not strictly increasing inside 1..{}",
            spec.n - 1
        )));
    }
    let pieces: Vec<Piece> = std::iter::once(0)
        .chain(changes)
        .zip(cat.processes)
        .map(|(start, process)| Piece::new(start, process))
        .collect();
    let mut out = generate_pieces(&pieces, spec.n, spec.seed, burn_in)?;
    out.detectable_lags = cat.detectable;
    Ok(out)
}

fn as_index(v: f64, key: &str) -> Result<usize> {
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(MojoError::config(format!(
            "override '{key}' expects non-negative integers; got {v}"
        )))
    }
}
