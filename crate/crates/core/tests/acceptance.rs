//! Acceptance gate: one test and one printed pass/fail line per release
//! criterion. Tolerances are pinned as constants next to each check.
//!
//! The Monte-Carlo criteria run six-figure frame counts and take a few
//! minutes each on one core; everything else finishes in seconds.

use ofdm_im_noma::channel::{db_to_linear, propagate_freq, propagate_time, ChannelRealization, NoiseModel};
use ofdm_im_noma::complexity::{reduction_table, render_table, TableScenario};
use ofdm_im_noma::constellation::Constellation;
use ofdm_im_noma::detectors::{
    detect_proposed, detect_rotated_ml, llr_stage1, llr_stage1_bpsk, DetectorKind, UserLink,
};
use ofdm_im_noma::fft::Dft;
use ofdm_im_noma::im_mapping::{SubblockPayload, UserParams, UserRole};
use ofdm_im_noma::sim_harness::{
    render_csv, run_ber_sweep, BerRecord, Scenario, SimConfig,
};
use ofdm_im_noma::tx_chain::{build_subblock, ifft_with_cp, FrameLayout, SuperpositionSpec};
use ofdm_im_noma::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

/// Noise floor used by the exact-decoding criterion.
const NOISE_FLOOR: f64 = 1e-12;
/// Horizontal distance allowed between the reduced detector and rotated
/// ML at the reference BER levels.
const ORACLE_DB_TOL: f64 = 0.3;
/// Minimum fraction of subblocks where the two rotation-aware detectors
/// make identical decisions at the top of the sweep.
const AGREEMENT_MIN: f64 = 0.99;
/// Slack around the expected far-user gains.
const GAIN_DB_SLACK: f64 = 1.0;
/// The near user may not lose more than this against either baseline.
const NEAR_USER_SLACK_DB: f64 = 0.15;
/// Relative error allowed between the two propagation paths.
const PATH_REL_TOL: f64 = 1e-10;
/// Relative error allowed on the per-bin channel variance.
const VAR_REL_TOL: f64 = 0.02;
/// Agreement bound between the general and binary stage-1 expressions.
const STAGE1_TOL: f64 = 1e-10;

/// Frames per SNR point for the oracle-equivalence sweep.
const ORACLE_FRAMES: u64 = 200_000;
/// Frames per SNR point for the far-user gain sweeps.
const GAIN_FRAMES: u64 = 100_000;

fn report(criterion: usize, name: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!("acceptance criterion {criterion} ({name}): {status} [{detail}]");
    assert!(passed, "criterion {criterion} ({name}) failed: {detail}");
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[test]
fn criterion_1_complexity_tables() {
    let mid = reduction_table(TableScenario::Mid);
    let high = reduction_table(TableScenario::High);
    let hybrid = reduction_table(TableScenario::Hybrid);

    // Symmetric two-active geometry: far row 0/75/75, near row 50/75/87.5.
    let mut ok = mid[0].user == UserRole::Far
        && (mid[0].rotated_ml_reduction, mid[0].llr_sic_reduction, mid[0].proposed_reduction)
            == (0.0, 75.0, 75.0)
        && (mid[1].rotated_ml_reduction, mid[1].llr_sic_reduction, mid[1].proposed_reduction)
            == (50.0, 75.0, 87.5)
        && (mid[0].conventional_muls, mid[1].conventional_muls) == (32, 64);

    // Three-active geometry, rounded to one decimal: 0/91.7/91.7 and
    // 50/91.7/95.8.
    ok &= (high[0].conventional_muls, high[1].conventional_muls) == (96, 192)
        && round1(high[0].rotated_ml_reduction) == 0.0
        && round1(high[0].llr_sic_reduction) == 91.7
        && round1(high[0].proposed_reduction) == 91.7
        && round1(high[1].rotated_ml_reduction) == 50.0
        && round1(high[1].llr_sic_reduction) == 91.7
        && round1(high[1].proposed_reduction) == 95.8;

    // Mixed geometry: far-user two-stage reduction is exactly 0, near-user
    // reduced detector lands at 92.3 after rounding.
    ok &= hybrid[0].llr_sic_reduction == 0.0 && round1(hybrid[1].proposed_reduction) == 92.3;

    // The rendered mixed table must carry both the formula-derived rows
    // and the note about the commonly quoted figures.
    let rendered = render_table(TableScenario::Hybrid);
    ok &= rendered.contains("104")
        && rendered.contains("92.31")
        && rendered.contains("0/25, 75/87.5, 75/93.75")
        && rendered.contains("assume k_B = 2");

    report(
        1,
        "complexity tables",
        ok,
        "mid 0/75/75 and 50/75/87.5, high 0/91.7/91.7 and 50/91.7/95.8, hybrid formula rows plus note",
    );
}

#[test]
fn criterion_2_noiseless_exhaustive_decode() {
    let start = Instant::now();
    let spec = SuperpositionSpec::new(0.1, 1.0).unwrap();
    let base = Constellation::bpsk();
    let rotated = base.rotated(FRAC_PI_2);
    let gain_near = db_to_linear(4.0);
    let gain_far = db_to_linear(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0u64;

    for scenario in Scenario::ALL {
        let (k_near, k_far) = scenario.active_counts();
        let near_params = UserParams::new(UserRole::Near, 4, k_near, 2).unwrap();
        let far_params = UserParams::new(UserRole::Far, 4, k_far, 2).unwrap();
        let near = UserLink::new(near_params, rotated.clone(), spec.near_power()).unwrap();
        let far = UserLink::new(far_params, base.clone(), spec.far_power()).unwrap();
        let (cn, cf) = (near_params.bit_counts(), far_params.bit_counts());

        let mut x_near = [Complex64::new(0.0, 0.0); 4];
        let mut x_far = [Complex64::new(0.0, 0.0); 4];
        for _ in 0..100 {
            let mut draw = |gain: f64| -> Vec<Complex64> {
                let s = (gain / 2.0).sqrt();
                (0..4)
                    .map(|_| {
                        Complex64::new(
                            s * rng.sample::<f64, _>(StandardNormal),
                            s * rng.sample::<f64, _>(StandardNormal),
                        )
                    })
                    .collect()
            };
            let h_near = draw(gain_near);
            let h_far = draw(gain_far);

            for iw_a in 0..1u32 << cn.index_bits {
                for sw_a in 0..1u32 << cn.symbol_bits {
                    let pa = SubblockPayload { index_word: iw_a, symbol_word: sw_a };
                    build_subblock(pa, near.table(), near.alphabet(), &mut x_near);
                    for iw_b in 0..1u32 << cf.index_bits {
                        for sw_b in 0..1u32 << cf.symbol_bits {
                            let pb = SubblockPayload { index_word: iw_b, symbol_word: sw_b };
                            build_subblock(pb, far.table(), far.alphabet(), &mut x_far);

                            let tx: Vec<Complex64> = (0..4)
                                .map(|i| {
                                    spec.near_scale() * x_near[i] + spec.far_scale() * x_far[i]
                                })
                                .collect();
                            let y_near: Vec<Complex64> =
                                (0..4).map(|i| tx[i] * h_near[i]).collect();
                            let y_far: Vec<Complex64> =
                                (0..4).map(|i| tx[i] * h_far[i]).collect();

                            for (est, truth) in [
                                (detect_proposed(&y_near, &h_near, NOISE_FLOOR, &near, None), pa),
                                (detect_proposed(&y_far, &h_far, NOISE_FLOOR, &far, None), pb),
                                (detect_rotated_ml(&y_near, &h_near, &near, None), pa),
                                (detect_rotated_ml(&y_far, &h_far, &far, None), pb),
                            ] {
                                assert_eq!(
                                    est.payload, truth,
                                    "{} geometry, noiseless decode mismatch",
                                    scenario.name()
                                );
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "noiseless exhaustive decode",
        elapsed < 60.0,
        &format!("{checked} payload-pair decodes exact at noise floor {NOISE_FLOOR:e}, {elapsed:.1}s (cap 60s)"),
    );
}

/// SNR (dB) where `detector`'s curve at `user` crosses `target` BER,
/// by linear interpolation of log10(BER) between sweep points.
fn crossing_db(records: &[BerRecord], detector: DetectorKind, user: UserRole, target: f64) -> f64 {
    let mut curve: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.detector == detector && r.user == user)
        .map(|r| (r.snr_db, r.ber()))
        .collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(
        curve.first().map(|p| p.1 > target).unwrap_or(false),
        "{detector} {user}: sweep starts below BER {target:e}"
    );
    for pair in curve.windows(2) {
        let (s0, b0) = pair[0];
        let (s1, b1) = pair[1];
        if b0 > target && b1 <= target {
            assert!(b1 > 0.0, "{detector} {user}: no errors at {s1} dB, sweep too coarse");
            let t = (b0.log10() - target.log10()) / (b0.log10() - b1.log10());
            return s0 + t * (s1 - s0);
        }
    }
    panic!("{detector} {user}: curve never crosses BER {target:e}");
}

#[test]
fn criterion_3_reduced_detector_tracks_rotated_ml() {
    let start = Instant::now();
    let mut config = SimConfig {
        snr_start_db: 14.0,
        snr_stop_db: 34.0,
        snr_step_db: 2.0,
        frames_per_point: ORACLE_FRAMES,
        ..SimConfig::default()
    };
    Scenario::Agreement.apply(&mut config);
    let records = run_ber_sweep(&config).unwrap();

    let mut worst_gap = 0.0f64;
    for user in [UserRole::Near, UserRole::Far] {
        for target in [1e-2, 1e-3] {
            let reduced = crossing_db(&records, DetectorKind::Proposed, user, target);
            let oracle = crossing_db(&records, DetectorKind::RotatedMl, user, target);
            worst_gap = worst_gap.max((reduced - oracle).abs());
        }
    }

    // Decision-level agreement at the top of the sweep: both detectors
    // read the same received frames, subblock by subblock.
    let agreement = decision_agreement(34.0, 2_000);

    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        "reduced detector tracks rotated ML",
        worst_gap <= ORACLE_DB_TOL && agreement >= AGREEMENT_MIN && elapsed < 600.0,
        &format!(
            "max horizontal gap {worst_gap:.3} dB (tol {ORACLE_DB_TOL}), decision agreement {:.4} (min {AGREEMENT_MIN}), {elapsed:.0}s (cap 600s)",
            agreement
        ),
    );
}

/// Fraction of subblocks (both users pooled) where the reduced detector
/// and rotated ML pick the same payload, at one SNR point.
fn decision_agreement(snr_db: f64, frames: u64) -> f64 {
    let spec = SuperpositionSpec::new(0.1, 1.0).unwrap();
    let layout = FrameLayout::new(256, 4).unwrap();
    let base = Constellation::bpsk();
    let rotated = base.rotated(FRAC_PI_2);
    let params = |role| UserParams::new(role, 4, 2, 2).unwrap();
    let near = UserLink::new(params(UserRole::Near), rotated, spec.near_power()).unwrap();
    let far = UserLink::new(params(UserRole::Far), base, spec.far_power()).unwrap();

    let dft = Dft::new(256);
    let noise = NoiseModel::from_snr_db(1.0, snr_db);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut ch_near = ChannelRealization::draw(&mut rng, 12, db_to_linear(4.0), &dft).unwrap();
    let mut ch_far = ChannelRealization::draw(&mut rng, 12, db_to_linear(0.0), &dft).unwrap();

    let g = layout.num_subblocks();
    let mut frame_near = vec![Complex64::new(0.0, 0.0); 256];
    let mut frame_far = frame_near.clone();
    let (mut same, mut total) = (0u64, 0u64);

    for _ in 0..frames {
        ch_near.redraw(&mut rng, &dft);
        ch_far.redraw(&mut rng, &dft);
        for gi in 0..g {
            let r = layout.subblock_range(gi);
            let pa = SubblockPayload {
                index_word: rng.gen_range(0..4),
                symbol_word: rng.gen_range(0..4),
            };
            let pb = SubblockPayload {
                index_word: rng.gen_range(0..4),
                symbol_word: rng.gen_range(0..4),
            };
            build_subblock(pa, near.table(), near.alphabet(), &mut frame_near[r.clone()]);
            build_subblock(pb, far.table(), far.alphabet(), &mut frame_far[r]);
        }

        for (link, ch) in [(&near, &ch_near), (&far, &ch_far)] {
            for gi in 0..g {
                let r = layout.subblock_range(gi);
                let h = &ch.freq_response()[r.clone()];
                let y: Vec<Complex64> = r
                    .clone()
                    .map(|i| {
                        let x = spec.near_scale() * frame_near[i] + spec.far_scale() * frame_far[i];
                        x * ch.freq_response()[i] + noise.sample(&mut rng)
                    })
                    .collect();
                let reduced = detect_proposed(&y, h, noise.variance(), link, None);
                let oracle = detect_rotated_ml(&y, h, link, None);
                same += (reduced.payload == oracle.payload) as u64;
                total += 1;
            }
        }
    }
    same as f64 / total as f64
}

#[test]
fn criterion_4_far_user_gains_over_baselines() {
    let start = Instant::now();
    let cases = [
        (Scenario::High, 4.0),
        (Scenario::Low, 2.0),
        (Scenario::Hybrid, 5.5),
    ];
    let mut details = Vec::new();
    let mut ok = true;

    for (scenario, expected_gain) in cases {
        let curve_start = Instant::now();
        let mut config = SimConfig {
            snr_start_db: 18.0,
            snr_stop_db: 38.0,
            snr_step_db: 2.0,
            frames_per_point: GAIN_FRAMES,
            ..SimConfig::default()
        };
        scenario.apply(&mut config);
        let records = run_ber_sweep(&config).unwrap();
        let curve_secs = curve_start.elapsed().as_secs_f64();
        ok &= curve_secs < 1800.0;

        let at = |detector, user| crossing_db(&records, detector, user, 1e-3);
        let reduced_far = at(DetectorKind::Proposed, UserRole::Far);
        let reduced_near = at(DetectorKind::Proposed, UserRole::Near);

        for baseline in [DetectorKind::ConventionalMl, DetectorKind::TwoStageLlrSic] {
            let gain_far = at(baseline, UserRole::Far) - reduced_far;
            ok &= (gain_far - expected_gain).abs() <= GAIN_DB_SLACK;
            details.push(format!(
                "{} vs {}: far gain {gain_far:.2} dB (expect {expected_gain}+-{GAIN_DB_SLACK})",
                scenario.name(),
                baseline.name(),
            ));
            // Near user: equal or slightly better, never worse.
            let near_margin = at(baseline, UserRole::Near) - reduced_near;
            ok &= near_margin >= -NEAR_USER_SLACK_DB;
            details.push(format!(
                "{} vs {}: near margin {near_margin:+.2} dB (floor -{NEAR_USER_SLACK_DB})",
                scenario.name(),
                baseline.name(),
            ));
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    details.push(format!("{elapsed:.0}s total"));
    report(4, "far-user gains over baselines", ok, &details.join("; "));
}

#[test]
fn criterion_5_propagation_paths_agree() {
    let (n, taps, cp) = (256, 12, 16);
    let dft = Dft::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ch = ChannelRealization::draw(&mut rng, taps, 1.0, &dft).unwrap();
    let mut worst = 0.0f64;

    for _ in 0..1000 {
        ch.redraw(&mut rng, &dft);
        let frame: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let by_freq = propagate_freq(&frame, &ch);
        let by_time = propagate_time(&ifft_with_cp(&frame, &dft, cp), &ch, &dft, false).unwrap();
        let (mut diff, mut norm) = (0.0, 0.0);
        for (a, b) in by_freq.iter().zip(&by_time) {
            diff += (a - b).norm_sqr();
            norm += a.norm_sqr();
        }
        worst = worst.max((diff / norm).sqrt());
    }

    report(
        5,
        "propagation paths agree",
        worst < PATH_REL_TOL,
        &format!("max relative error {worst:.2e} over 1000 frames (tol {PATH_REL_TOL:e})"),
    );
}

#[test]
fn criterion_6_statistical_checks() {
    // Per-bin variance of the frequency response equals the average
    // channel power gain.
    let dft = Dft::new(256);
    let gain = db_to_linear(4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ch = ChannelRealization::draw(&mut rng, 12, gain, &dft).unwrap();
    let draws = 100_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        ch.redraw(&mut rng, &dft);
        acc += ch.freq_response().iter().map(|h| h.norm_sqr()).sum::<f64>() / 256.0;
    }
    let var_err = (acc / draws as f64 / gain - 1.0).abs();

    // The binary fast path of the stage-1 activity metric matches the
    // general expression.
    let alphabet = Constellation::bpsk();
    let (q0, q1) = (alphabet.point(0), alphabet.point(1));
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let y = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let h = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let var = 10f64.powf(rng.gen_range(-6.0..1.0));
        let power = rng.gen_range(0.05..1.0);
        let (k, n) = (rng.gen_range(1..4usize), 4);
        let general = llr_stage1(y, h, power, var, k, n, &alphabet);
        let fast = llr_stage1_bpsk(y, h, power, var, k, n, q0, q1);
        worst = worst.max((general - fast).abs());
    }

    report(
        6,
        "statistical checks",
        var_err < VAR_REL_TOL && worst < STAGE1_TOL,
        &format!(
            "bin variance off by {var_err:.2e} over {draws} draws (tol {VAR_REL_TOL}); stage-1 fast path off by {worst:.2e} over 10000 inputs (tol {STAGE1_TOL:e})"
        ),
    );
}

#[test]
fn criterion_7_worker_count_determinism() {
    let base = SimConfig {
        n_total: 64,
        cp_len: 16,
        snr_start_db: 10.0,
        snr_stop_db: 30.0,
        snr_step_db: 10.0,
        frames_per_point: 400,
        ..SimConfig::default()
    };
    let reference = render_csv(&run_ber_sweep(&base).unwrap());
    let mut ok = !reference.is_empty();
    for workers in [2usize, 8] {
        let csv = render_csv(&run_ber_sweep(&SimConfig { workers, ..base.clone() }).unwrap());
        ok &= csv == reference;
    }

    report(
        7,
        "worker-count determinism",
        ok,
        "CSV bytes identical for 1, 2, and 8 workers at a fixed seed",
    );
}
