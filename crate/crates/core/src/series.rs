// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense row-major containers for the observed series and its lagged pairs.

use crate::error::{MojoError, Result};

/// An `n x p` real matrix; row `t` is the observation at time `t + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    n: usize,
    p: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(MojoError::input(format!(
                "time series must have n >= 1 and p >= 1; got n={n}, p={p}"
            )));
        }
        if values.len() != n * p {
            return Err(MojoError::DimensionMismatch {
                expected: n * p,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(MojoError::input(format!(
                "non-finite value at row {}, column {}",
                pos / p + 1,
                pos % p + 1
            )));
        }
        Ok(Self { values, n, p })
    }

    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, n, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != p) {
            return Err(MojoError::input(format!(
                "row {} has {} columns; expected {p}",
                i + 1,
                r.len()
            )));
        }
        Self::new(rows.concat(), rows.len(), p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.p..(t + 1) * self.p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    /// Returns a copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.n,
            self.p,
        )
    }

    /// Returns a copy with `shift` added to every row.
    pub fn shifted(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.p {
            return Err(MojoError::DimensionMismatch {
                expected: self.p,
                got: shift.len(),
            });
        }
        let values = self
            .rows()
            .flat_map(|r| r.iter().zip(shift).map(|(a, b)| a + b))
            .collect();
        Self::new(values, self.n, self.p)
    }

    /// Materialises `Y_t = (X_t, X_{t+lag})` for `t = 1..n-lag`.
    pub fn lagged(&self, lag: usize) -> Result<LaggedSeries> {
        make_lagged(self, lag)
    }
}

/// Rows `Y_t = (X_t, X_{t+lag})`, each of dimension `2p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaggedSeries {
    rows: Vec<f64>,
    len: usize,
    dim: usize,
    lag: usize,
}

impl LaggedSeries {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Row dimension, `2p`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    /// Length of the source series, `len + lag`.
    pub fn source_len(&self) -> usize {
        self.len + self.lag
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t * self.dim..(t + 1) * self.dim]
    }
}

/// Builds the lagged-pair rows for a given lag.
pub fn make_lagged(ts: &TimeSeries, lag: usize) -> Result<LaggedSeries> {
    let n = ts.len();
    if lag >= n {
        return Err(MojoError::input(format!(
            "lag {lag} must be smaller than the series length {n}"
        )));
    }
    let p = ts.dim();
    let len = n - lag;
    let mut rows = Vec::with_capacity(len * 2 * p);
    for t in 0..len {
        rows.extend_from_slice(ts.row(t));
        rows.extend_from_slice(ts.row(t + lag));
    }
    Ok(LaggedSeries {
        rows,
        len,
        dim: 2 * p,
        lag,
    })
}
