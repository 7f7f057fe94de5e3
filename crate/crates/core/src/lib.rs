// SPDX-License-Identifier: MIT OR Apache-2.0

//! Nonparametric multi-lag moving-sum change-point detection.
//!
//! The detector compares, in a sliding window of half-width `G`, the joint
//! law of `(X_t, X_{t+l})` before and after each candidate time through a
//! kernel two-sample statistic. Thresholds come from a dependent wild
//! bootstrap; estimates from several lags (and optionally several
//! bandwidths) are merged into one segmentation.
//!
//! ```no_run
//! use npmojo_core::{
//!     np_mojo_multi, BootstrapConfig, KernelChoice, MergeParams, TimeSeries,
//! };
//!
//! let x: Vec<f64> = (0..600).map(|t| if t < 300 { 0.0 } else { 1.0 }).collect();
//! let ts = TimeSeries::from_column(x).unwrap();
//! let res = np_mojo_multi(
//!     &ts,
//!     &[0, 1, 2],
//!     100,
//!     &KernelChoice::default(),
//!     &BootstrapConfig::for_length(ts.len()),
//!     &MergeParams::default(),
//! )
//! .unwrap();
//! for cp in &res.merged {
//!     println!("{} (lag {}, score {:.3})", cp.location, cp.lag, cp.score);
//! }
//! ```

#![forbid(unsafe_code)]

pub mod bootstrap;
pub mod detector;
pub mod error;
pub mod kernels;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod segment;
pub mod series;
pub mod simulate;

pub use bootstrap::{run_bootstrap, BootstrapConfig, BootstrapResult};
pub use detector::{detector_profile, detector_profile_counted, direct_detector, DetectorProfile};
pub use error::{MojoError, Result};
pub use kernels::{median_trick, KernelFamily, KernelSign, KernelSpec};
pub use metrics::{aggregate, covering_metric, v_measure, EvalReport, Summary};
pub use pipeline::{
    adaptive_lags, default_bandwidth, np_mojo_multi, np_mojo_multiscale, np_mojo_single,
    AdaptiveResult, KernelChoice, LagResult, MultiLagResult, MultiscaleResult,
};
pub use segment::{
    fibonacci_bandwidths, locate_changes, multi_lag_merge, multiscale_merge, ChangePointEstimate,
    MergeParams, MergeSelection, Segmentation,
};
pub use series::{make_lagged, LaggedSeries, TimeSeries};
pub use simulate::{generate, generate_custom, LabeledSeries, ScenarioId, ScenarioSpec};
