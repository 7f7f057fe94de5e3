// SPDX-License-Identifier: MIT OR Apache-2.0

//! Inputs shared by the benchmarks.

use npmojo_core::{generate, ScenarioId, ScenarioSpec, TimeSeries};

/// A mean-shift series of length `n` with its default bandwidth `n / 6`.
pub fn workload(n: usize) -> (TimeSeries, usize) {
    let data = generate(&ScenarioSpec::new(ScenarioId::A1, n, 1)).expect("catalog scenario");
    (data.data, n / 6)
}
