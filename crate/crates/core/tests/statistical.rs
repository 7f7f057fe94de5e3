// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small-scale statistical behaviour. The full-size versions run in the
//! acceptance suite of the command-line crate.

mod support;

use npmojo_core::simulate::{Innovation, Piece, SegmentProcess};
use npmojo_core::{
    adaptive_lags, detector_profile, fibonacci_bandwidths, generate, generate_custom,
    np_mojo_multiscale, np_mojo_single, BootstrapConfig, KernelChoice, KernelSpec, MergeParams,
    ScenarioId, ScenarioSpec,
};
use support::checks;

fn boot(n: usize, reps: usize, seed: u64) -> BootstrapConfig {
    BootstrapConfig {
        reps,
        master_seed: seed,
        ..BootstrapConfig::for_length(n)
    }
}

#[test]
fn strong_mean_shift_is_localised_by_the_profile_argmax() {
    let g = 166;
    let pieces = [
        Piece::new(0, SegmentProcess::gaussian(1)),
        Piece::new(500, SegmentProcess::gaussian(1).with_mean(vec![2.0])),
    ];
    let hits = (0..100)
        .filter(|&seed| {
            let data = generate_custom(&pieces, 1000, seed).unwrap();
            let prof = detector_profile(
                &data.data.lagged(0).unwrap(),
                g,
                &KernelSpec::quad_exp(1.0).unwrap(),
            )
            .unwrap();
            (prof.argmax() as f64 - 500.0).abs() <= 0.2 * g as f64
        })
        .count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn example1_lag_one_reacts_to_the_autocorrelation_flip() {
    // Lag 0 stays flat around the second change, lag 1 does not.
    let ok = (0..20).filter(|&s| checks::example1_contrast(s)).count();
    assert!(ok >= 16, "{ok}/20");
}

#[test]
fn single_lag_finds_the_mean_changes() {
    let hits = (0..10)
        .filter(|&seed| {
            let data = generate(&ScenarioSpec::new(ScenarioId::A1, 1000, seed)).unwrap();
            let res = np_mojo_single(
                &data.data,
                0,
                166,
                &KernelChoice::default(),
                &boot(1000, 99, seed),
                &MergeParams::default(),
            )
            .unwrap();
            res.estimates.len() == 3
                && res
                    .estimates
                    .iter()
                    .zip([250.0, 500.0, 750.0])
                    .all(|(e, t)| (e.location as f64 - t).abs() <= 25.0)
        })
        .count();
    assert!(hits >= 8, "{hits}/10");
}

#[test]
fn c2_changes_are_seen_at_lag_two_only() {
    let runs = checks::replicate(ScenarioId::C2, 1000, &[0, 1, 2], None, 99, 16, 100);
    let quiet0 = checks::proportion(&runs, |r| r.lag_count(0) == 0);
    let quiet1 = checks::proportion(&runs, |r| r.lag_count(1) == 0);
    let found2 = checks::proportion(&runs, |r| r.lag_count(2) == 2);
    assert!(quiet0 >= 0.6 && quiet1 >= 0.6 && found2 >= 0.6, "{quiet0} {quiet1} {found2}");
}

#[test]
fn null_series_rarely_trigger_detections() {
    let runs = checks::replicate(ScenarioId::N1, 1000, &[0], None, 99, 30, 200);
    let false_rate = checks::proportion(&runs, |r| !r.merged.is_empty());
    assert!(false_rate <= 0.3, "false detection rate {false_rate}");
}

#[test]
fn adaptive_search_extends_past_uninformative_lags() {
    // AR(1) sign flips are invisible at lag 0 and visible at lag 1.
    let mut stops = 0;
    let mut found = 0;
    for seed in 0..6 {
        let data = generate(&ScenarioSpec::new(ScenarioId::C1, 1000, seed)).unwrap();
        let res = adaptive_lags(
            &data.data,
            &[0],
            166,
            &KernelChoice::default(),
            &boot(1000, 99, seed),
            &MergeParams::default(),
            20,
        )
        .unwrap();
        assert_eq!(res.lags[0], 0);
        assert!(res.lags.len() >= 2);
        if res.stopped_at.is_some() {
            stops += 1;
        }
        let near = |t: f64| res.estimates.iter().any(|e| (e.location as f64 - t).abs() <= 40.0);
        if near(333.0) && near(667.0) {
            found += 1;
        }
    }
    assert_eq!(stops, 6);
    assert!(found >= 5, "{found}/6");
}

#[test]
fn multiscale_recovers_close_and_distant_changes() {
    let hits = (0..6)
        .filter(|&seed| {
            let data = generate(&ScenarioSpec::new(ScenarioId::M1, 1000, seed)).unwrap();
            let ladder = fibonacci_bandwidths(1000, 4);
            assert_eq!(ladder, vec![62, 124, 186, 310]);
            let res = np_mojo_multiscale(
                &data.data,
                &[0, 1, 2],
                &ladder,
                &KernelChoice::default(),
                &boot(1000, 99, seed),
                &MergeParams::default(),
            )
            .unwrap();
            [80.0, 250.0, 600.0]
                .iter()
                .all(|t| res.merged.iter().any(|e| (e.location as f64 - t).abs() <= 30.0))
        })
        .count();
    assert!(hits >= 4, "{hits}/6");
}

#[test]
fn bernoulli_segments_need_a_fixed_scale() {
    let pieces = [
        Piece::new(0, SegmentProcess::iid(1, Innovation::new(npmojo_core::simulate::Law::Bernoulli { prob: 0.2 }, 0.0, 1.0))),
        Piece::new(300, SegmentProcess::iid(1, Innovation::new(npmojo_core::simulate::Law::Bernoulli { prob: 0.7 }, 0.0, 1.0))),
    ];
    let data = generate_custom(&pieces, 600, 5).unwrap();
    // Most pairwise distances are zero, so the median trick has nothing to work with.
    let err = np_mojo_single(
        &data.data,
        0,
        100,
        &KernelChoice::default(),
        &boot(600, 99, 5),
        &MergeParams::default(),
    )
    .unwrap_err();
    assert!(matches!(err, npmojo_core::MojoError::DegenerateScale { .. }));
    let res = np_mojo_single(
        &data.data,
        0,
        100,
        &KernelChoice::fixed(KernelSpec::quad_exp(1.0).unwrap()),
        &boot(600, 99, 5),
        &MergeParams::default(),
    )
    .unwrap();
    assert!(res.estimates.iter().any(|e| (e.location as f64 - 300.0).abs() <= 20.0));
}
