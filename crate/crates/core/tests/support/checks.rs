// SPDX-License-Identifier: MIT OR Apache-2.0

//! Randomised comparison drivers and replication harnesses shared by the
//! core test suites and the acceptance run.

use super::*;
use npmojo_core::bootstrap::{bootstrap_replicate, generate_multipliers};
use npmojo_core::{
    covering_metric, detector_profile, detector_profile_counted, locate_changes, multi_lag_merge,
    multiscale_merge, np_mojo_multi, v_measure, BootstrapConfig, DetectorProfile, KernelChoice,
    KernelFamily, KernelSpec, MergeParams, MergeSelection, ScenarioId, ScenarioSpec, Segmentation,
    TimeSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn random_kernel(rng: &mut ChaCha8Rng) -> (KernelFamily, f64) {
    match rng.gen_range(0..3) {
        0 => (KernelFamily::Gauss, rng.gen_range(0.3..2.0)),
        1 => (KernelFamily::QuadExp, rng.gen_range(0.3..3.0)),
        _ => (KernelFamily::Energy, rng.gen_range(0.2..1.9)),
    }
}

/// Largest `|sequential - direct|` over `configs` random settings with
/// `n <= 200`, `p <= 3`, `lag <= 3`, checked at every location.
pub fn detector_oracle(configs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..configs {
        let lag = rng.gen_range(0..=3usize);
        let g = rng.gen_range((lag + 1).max(2)..=40);
        let n = rng.gen_range(2 * g..=200.max(2 * g));
        let p = rng.gen_range(1..=3);
        let x = random_series(&mut rng, n, p);
        let (family, scale) = random_kernel(&mut rng);
        let ls = TimeSeries::from_rows(&x).unwrap().lagged(lag).unwrap();
        let spec = KernelSpec::new(family, scale).unwrap();
        let prof = detector_profile(&ls, g, &spec).unwrap();
        assert_eq!(prof.values().len(), n - 2 * g + 1);
        for (k, v) in prof.iter() {
            let direct = detector(&x, lag, g, k, family, scale);
            worst = worst.max((v - direct).abs());
        }
    }
    worst
}

/// Largest `|library - oracle|` of the bootstrap replicate over `instances`
/// random small problems and multiplier sequences.
pub fn bootstrap_oracle(instances: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let lag = rng.gen_range(0..=2usize);
        let g = rng.gen_range((lag + 1).max(2)..=25);
        let n = rng.gen_range(2 * g..=120.max(2 * g));
        let p = rng.gen_range(1..=2);
        let x = random_series(&mut rng, n, p);
        let (family, scale) = random_kernel(&mut rng);
        let w: Vec<f64> = if i % 2 == 0 {
            (0..n - g).map(|_| rng.gen_range(-2.0..2.0)).collect()
        } else {
            generate_multipliers(n - g, rng.gen_range(0.5..6.0), &mut rng)
        };
        let ls = TimeSeries::from_rows(&x).unwrap().lagged(lag).unwrap();
        let spec = KernelSpec::new(family, scale).unwrap();
        let got = bootstrap_replicate(&ls, g, &spec, &w).unwrap();
        let want = bootstrap_statistic(&x, lag, g, family, scale, &w);
        worst = worst.max((got - want).abs());
    }
    worst
}

/// Largest CM and VM deviations from the set/contingency oracles.
pub fn metric_oracle(pairs: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cm_err, mut vm_err) = (0.0f64, 0.0f64);
    for _ in 0..pairs {
        let n = rng.gen_range(2..=300);
        let est = random_changes(&mut rng, n);
        let truth = random_changes(&mut rng, n);
        let e = Segmentation::new(n, est.clone()).unwrap();
        let t = Segmentation::new(n, truth.clone()).unwrap();
        cm_err = cm_err.max((covering_metric(&e, &t).unwrap() - covering(n, &est, &truth)).abs());
        vm_err = vm_err.max((v_measure(&e, &t).unwrap() - v_measure_oracle(n, &est, &truth)).abs());
    }
    (cm_err, vm_err)
}

fn v_measure_oracle(n: usize, est: &[usize], truth: &[usize]) -> f64 {
    super::v_measure(n, est, truth)
}

/// CM of an empty estimate against a single midpoint change.
pub fn midpoint_cm() -> f64 {
    let truth = Segmentation::new(1000, vec![500]).unwrap();
    let est = Segmentation::new(1000, vec![]).unwrap();
    covering_metric(&est, &truth).unwrap()
}

/// Mismatch counts `(locate, multi-lag, multiscale)` against the references.
pub fn merge_references(inputs: usize, seed: u64) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = (0, 0, 0);
    let dummy = KernelSpec::quad_exp(1.0).unwrap();
    for _ in 0..inputs {
        // locate_changes on coarse-valued profiles, so plateaus and ties occur
        let g = rng.gen_range(2..=80);
        let len = rng.gen_range(1..=300);
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(0..6) as f64 * 0.5).collect();
        let threshold = rng.gen_range(0..5) as f64 * 0.5 + 0.25;
        let params = MergeParams {
            eta: rng.gen_range(0.05..0.95),
            min_exceed_frac: [0.0, 0.02, 0.05, 0.1][rng.gen_range(0..4)],
            ..MergeParams::default()
        };
        let prof = DetectorProfile::from_values(values.clone(), g, 0, dummy);
        let got: Vec<usize> = locate_changes(&prof, threshold, &params)
            .iter()
            .map(|e| e.location - g)
            .collect();
        let want = locate(&values, g, threshold, params.eta, params.min_exceed_frac);
        if got != want {
            bad.0 += 1;
        }

        // multi_lag_merge
        let g = rng.gen_range(5..=120);
        let n = 2 * g + rng.gen_range(0..600);
        let lags = rng.gen_range(1..=4);
        let cands = random_candidates(&mut rng, lags, n, g);
        let params = MergeParams {
            c: rng.gen_range(0.2..2.0),
            selection: if rng.gen_bool(0.5) {
                MergeSelection::Score
            } else {
                MergeSelection::Statistic
            },
            ..MergeParams::default()
        };
        let key = |v: &[npmojo_core::ChangePointEstimate]| {
            v.iter()
                .map(|e| (e.location, e.lag, e.stat.to_bits(), e.score.to_bits()))
                .collect::<Vec<_>>()
        };
        let got = multi_lag_merge(&cands, g, &params);
        let want = merge(&cands, g, params.c, params.selection);
        if key(&got) != key(&want) {
            bad.1 += 1;
        }

        // multiscale_merge over a random increasing ladder
        let rungs = rng.gen_range(1..=4);
        let mut gs: Vec<usize> = Vec::new();
        let mut cur = rng.gen_range(5..40);
        for _ in 0..rungs {
            gs.push(cur);
            cur += rng.gen_range(1..40);
        }
        let n = 2 * gs[gs.len() - 1] + rng.gen_range(0..500);
        let ladder: Vec<(usize, Vec<npmojo_core::ChangePointEstimate>)> = gs
            .iter()
            .map(|&g| {
                let mut c = random_candidates(&mut rng, 1, n, g).concat();
                for e in &mut c {
                    e.lag = rng.gen_range(0..3);
                }
                (g, c)
            })
            .collect();
        let big_c = rng.gen_range(0.1..0.99);
        let params = MergeParams {
            big_c,
            ..MergeParams::default()
        };
        let got: Vec<_> = multiscale_merge(&ladder, &params)
            .unwrap()
            .iter()
            .map(|e| (e.location, e.lag, e.bandwidth))
            .collect();
        if got != multiscale(&ladder, big_c) {
            bad.2 += 1;
        }
    }
    bad
}

/// Relative gap between the weighted characteristic-function integral and
/// the kernel expectation form of the discrepancy, for two discrete laws on
/// the real line. The integral is evaluated by the trapezoidal rule.
pub fn kernel_identity(delta: f64) -> f64 {
    let a: [(f64, f64); 3] = [(-1.0, 0.2), (0.5, 0.5), (2.0, 0.3)];
    let b: [(f64, f64); 2] = [(0.0, 0.6), (1.5, 0.4)];
    // characteristic function of a discrete law at u
    let cf = |law: &[(f64, f64)], u: f64| -> (f64, f64) {
        law.iter()
            .fold((0.0, 0.0), |(re, im), &(x, p)| (re + p * (u * x).cos(), im + p * (u * x).sin()))
    };
    let norm = std::f64::consts::PI.sqrt() / (2.0 * delta.powf(1.5));
    let weight = |u: f64| u * u * (-delta * u * u).exp() / norm;
    let half_width = (60.0 / delta).sqrt();
    let steps = 200_000;
    let du = 2.0 * half_width / steps as f64;
    let mut integral = 0.0;
    for i in 0..=steps {
        let u = -half_width + i as f64 * du;
        let (ra, ia) = cf(&a, u);
        let (rb, ib) = cf(&b, u);
        let f = ((ra - rb).powi(2) + (ia - ib).powi(2)) * weight(u);
        integral += if i == 0 || i == steps { 0.5 * f } else { f };
    }
    integral *= du;

    let spec = KernelSpec::quad_exp(delta).unwrap();
    let expect = |p: &[(f64, f64)], q: &[(f64, f64)]| -> f64 {
        let mut e = 0.0;
        for &(x, px) in p {
            for &(y, py) in q {
                e += px * py * spec.eval(&[x], &[y]).unwrap();
            }
        }
        e
    };
    let kernel_form = expect(&a, &a) + expect(&b, &b) - 2.0 * expect(&a, &b);
    ((integral - kernel_form) / kernel_form).abs()
}

/// Kernel-evaluation counts of the sequential profile for `n` with `G = n/6`,
/// and the least-squares slope of log(count) on log(n G).
pub fn complexity_slope(ns: &[usize]) -> (Vec<(usize, usize, u64)>, f64) {
    let spec = KernelSpec::quad_exp(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rows: Vec<(usize, usize, u64)> = ns
        .iter()
        .map(|&n| {
            let g = n / 6;
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ls = TimeSeries::from_column(x).unwrap().lagged(1).unwrap();
            let (_, count) = detector_profile_counted(&ls, g, &spec).unwrap();
            (n, g, count)
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|&(n, g, c)| (((n * g) as f64).ln(), (c as f64).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (rows, sxy / sxx)
}

/// Outcome of one multi-lag run on a generated series.
#[derive(Clone, Debug)]
pub struct Run {
    pub q_true: usize,
    pub merged: Vec<usize>,
    pub per_lag: Vec<(usize, Vec<usize>)>,
    pub cm: f64,
    pub vm: f64,
}

impl Run {
    pub fn lag_count(&self, lag: usize) -> usize {
        self.per_lag
            .iter()
            .find(|(l, _)| *l == lag)
            .map_or(0, |(_, v)| v.len())
    }
}

/// `reps` seeded multi-lag runs of a catalog scenario with `R` bootstrap
/// replicates and the default tuning (`G = n/6` unless given).
pub fn replicate(
    id: ScenarioId,
    n: usize,
    lags: &[usize],
    bandwidth: Option<usize>,
    boot_reps: usize,
    reps: usize,
    seed0: u64,
) -> Vec<Run> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let seed = seed0.wrapping_add(r);
            let data = npmojo_core::generate(&ScenarioSpec::new(id, n, seed)).unwrap();
            let cfg = BootstrapConfig {
                reps: boot_reps,
                master_seed: seed ^ 0x5eed,
                threads: 0,
                ..BootstrapConfig::for_length(n)
            };
            let g = bandwidth.unwrap_or(n / 6);
            let res = np_mojo_multi(
                &data.data,
                lags,
                g,
                &KernelChoice::default(),
                &cfg,
                &MergeParams::default(),
            )
            .unwrap();
            let est = Segmentation::from_estimates(n, &res.merged).unwrap();
            Run {
                q_true: data.truth.num_changes(),
                merged: res.merged.iter().map(|e| e.location).collect(),
                per_lag: res
                    .per_lag
                    .iter()
                    .map(|l| (l.lag, l.estimates.iter().map(|e| e.location).collect()))
                    .collect(),
                cm: covering_metric(&est, &data.truth).unwrap(),
                vm: v_measure(&est, &data.truth).unwrap(),
            }
        })
        .collect()
}

pub fn proportion<T>(runs: &[T], pred: impl Fn(&T) -> bool) -> f64 {
    runs.iter().filter(|r| pred(r)).count() as f64 / runs.len() as f64
}

pub fn mean<T>(runs: &[T], f: impl Fn(&T) -> f64) -> f64 {
    runs.iter().map(f).sum::<f64>() / runs.len() as f64
}

/// The lag-0 / lag-1 profile shape on the two-change illustration:
/// lag 0 peaks only near the mean shift, lag 1 near both changes.
pub fn example1_shape(seed: u64) -> bool {
    let data = npmojo_core::generate(&ScenarioSpec::new(ScenarioId::Example1, 1000, seed)).unwrap();
    let g = 166usize;
    let tol = 0.15 * g as f64;
    let profile = |lag: usize| {
        let spec = npmojo_core::pipeline::resolve_kernel(
            &data.data,
            lag,
            g,
            &KernelChoice::default(),
            seed,
        )
        .unwrap();
        detector_profile(&data.data.lagged(lag).unwrap(), g, &spec).unwrap()
    };
    let p0 = profile(0);
    let p1 = profile(1);
    let near = |k: usize, target: f64| (k as f64 - target).abs() <= tol;

    let peak0 = p0.argmax();
    let top0 = p0.at(peak0).unwrap();
    let around650 = p0
        .iter()
        .filter(|(k, _)| (*k as f64 - 650.0).abs() <= 0.5 * g as f64)
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let lag0_ok = near(peak0, 300.0) && around650 < 0.5 * top0;

    // local maximisers over +- floor(0.4 G), as in the selection rule
    let radius = (0.4 * g as f64).floor() as usize;
    let vals = p1.values();
    let local_max: Vec<usize> = (0..vals.len())
        .filter(|&i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(vals.len() - 1);
            (lo..=hi).all(|j| vals[j] <= vals[i])
        })
        .map(|i| g + i)
        .collect();
    let lag1_ok = local_max.iter().any(|&k| near(k, 300.0)) && local_max.iter().any(|&k| near(k, 650.0));
    lag0_ok && lag1_ok
}

/// Over `|k - 650| <= G/2` the lag-1 profile rises to more than twice the
/// lag-0 maximum, and the lag-0 profile there is below half its own peak.
pub fn example1_contrast(seed: u64) -> bool {
    let data = npmojo_core::generate(&ScenarioSpec::new(ScenarioId::Example1, 1000, seed)).unwrap();
    let g = 166usize;
    let profile = |lag: usize| {
        let spec = npmojo_core::pipeline::resolve_kernel(&data.data, lag, g, &KernelChoice::default(), seed)
            .unwrap();
        detector_profile(&data.data.lagged(lag).unwrap(), g, &spec).unwrap()
    };
    let around = |p: &npmojo_core::DetectorProfile| {
        p.iter()
            .filter(|(k, _)| (*k as f64 - 650.0).abs() <= 0.5 * g as f64)
            .map(|(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let p0 = profile(0);
    let p1 = profile(1);
    let peak0 = p0.at(p0.argmax()).unwrap();
    around(&p0) < 0.5 * peak0 && around(&p1) > 2.0 * around(&p0)
}
