//! Built-in sanity checks, fast enough to run before every campaign.
//!
//! Each check exercises one load-bearing invariant end to end with fixed
//! seeds, so a failed build, a broken dependency, or a numerically
//! unsound change surfaces in seconds instead of after a long sweep.

use crate::channel::{db_to_linear, propagate_freq, propagate_time, ChannelRealization};
use crate::complexity::{reduction_table, TableScenario};
use crate::constellation::Constellation;
use crate::detectors::{llr_stage1, llr_stage1_bpsk};
use crate::fft::Dft;
use crate::im_mapping::{bits_per_subblock, IndexLookupTable};
use crate::sim_harness::{render_csv, run_ber_sweep, Scenario, SimConfig};
use crate::tx_chain::{ifft_with_cp, SuperpositionSpec, TimeFrame};
use crate::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_PI_2;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    /// Short evidence line: the measured quantity and its bound.
    pub detail: String,
}

impl CheckReport {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Runs the full check suite. Deterministic and self-contained; finishes
/// in well under a minute on one core.
pub fn run_selftest() -> Vec<CheckReport> {
    vec![
        check_index_mapping(),
        check_rotation_orthogonality(),
        check_superposition_split(),
        check_stage1_fast_path(),
        check_channel_statistics(),
        check_path_equivalence(),
        check_noiseless_decoding(),
        check_determinism(),
        check_cost_tables(),
    ]
}

fn check_index_mapping() -> CheckReport {
    let table = IndexLookupTable::new(4, 2).unwrap();
    let expected: [&[usize]; 4] = [&[0, 1], &[1, 2], &[2, 3], &[0, 3]];
    let sets_ok = (0..4).all(|w| table.active_indices(w as u32) == expected[w]);
    let splits = [
        (bits_per_subblock(4, 2, 2), (2, 2)),
        (bits_per_subblock(4, 3, 2), (2, 3)),
        (bits_per_subblock(4, 1, 2), (2, 1)),
    ];
    let splits_ok = splits
        .iter()
        .all(|(c, (i, s))| c.index_bits == *i && c.symbol_bits == *s);
    CheckReport::new(
        "index mapping",
        sets_ok && splits_ok,
        "lookup sets and bit splits match the reference geometry".into(),
    )
}

fn check_rotation_orthogonality() -> CheckReport {
    let plain = Constellation::bpsk();
    let rotated = plain.rotated(FRAC_PI_2);
    let mut worst = 0.0f64;
    for a in rotated.points() {
        for b in plain.points() {
            worst = worst.max((a * b.conj()).re.abs());
        }
    }
    CheckReport::new(
        "rotation orthogonality",
        worst == 0.0,
        format!("largest in-phase leakage between alphabets = {worst:e} (exact zero required)"),
    )
}

fn check_superposition_split() -> CheckReport {
    let spec = SuperpositionSpec::new(0.1, 1.0).unwrap();
    let sum = spec.near_power() + spec.far_power();
    let ok = (sum - 1.0).abs() < 1e-15 && spec.near_scale() == 0.1f64.sqrt();
    CheckReport::new(
        "superposition split",
        ok,
        format!("near + far power = {sum} of total 1"),
    )
}

fn check_stage1_fast_path() -> CheckReport {
    let alphabet = Constellation::bpsk();
    let (q0, q1) = (alphabet.point(0), alphabet.point(1));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let y = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let h = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let var = 10f64.powf(rng.gen_range(-4.0..1.0));
        let general = llr_stage1(y, h, 0.9, var, 2, 4, &alphabet);
        let fast = llr_stage1_bpsk(y, h, 0.9, var, 2, 4, q0, q1);
        worst = worst.max((general - fast).abs());
    }
    CheckReport::new(
        "activity metric fast path",
        worst < 1e-10,
        format!("max |general - binary| = {worst:.3e} over 1000 draws (bound 1e-10)"),
    )
}

fn check_channel_statistics() -> CheckReport {
    let dft = Dft::new(64);
    let gain = db_to_linear(4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ch = ChannelRealization::draw(&mut rng, 12, gain, &dft).unwrap();
    let (mut tap_power, mut bin_power) = (0.0, 0.0);
    let draws = 2000;
    for _ in 0..draws {
        ch.redraw(&mut rng, &dft);
        tap_power += ch.taps().iter().map(|t| t.norm_sqr()).sum::<f64>();
        bin_power += ch.freq_response().iter().map(|h| h.norm_sqr()).sum::<f64>() / 64.0;
    }
    tap_power /= draws as f64;
    bin_power /= draws as f64;
    let tap_err = (tap_power / gain - 1.0).abs();
    let bin_err = (bin_power / gain - 1.0).abs();
    CheckReport::new(
        "channel statistics",
        tap_err < 0.1 && bin_err < 0.1,
        format!(
            "relative power error over {draws} draws: taps {tap_err:.4}, bins {bin_err:.4} (bound 0.1)"
        ),
    )
}

fn check_path_equivalence() -> CheckReport {
    let (n, taps, cp) = (64, 12, 16);
    let dft = Dft::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut ch = ChannelRealization::draw(&mut rng, taps, 1.0, &dft).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        ch.redraw(&mut rng, &dft);
        let frame: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let by_freq = propagate_freq(&frame, &ch);
        let tx: TimeFrame = ifft_with_cp(&frame, &dft, cp);
        let by_time = propagate_time(&tx, &ch, &dft, false).unwrap();
        let (mut diff, mut norm) = (0.0, 0.0);
        for (a, b) in by_freq.iter().zip(&by_time) {
            diff += (a - b).norm_sqr();
            norm += a.norm_sqr();
        }
        worst = worst.max((diff / norm).sqrt());
    }
    CheckReport::new(
        "propagation path equivalence",
        worst < 1e-10,
        format!("max relative frame error = {worst:.3e} over 50 frames (bound 1e-10)"),
    )
}

fn check_noiseless_decoding() -> CheckReport {
    let mut total_errors = 0;
    let mut total_bits = 0;
    for scenario in Scenario::ALL {
        let mut config = SimConfig {
            snr_start_db: 300.0,
            snr_stop_db: 300.0,
            frames_per_point: 10,
            ..SimConfig::default()
        };
        scenario.apply(&mut config);
        for record in run_ber_sweep(&config).unwrap() {
            total_errors += record.bit_errors;
            total_bits += record.bits_total;
        }
    }
    CheckReport::new(
        "noiseless decoding",
        total_errors == 0 && total_bits > 0,
        format!("{total_errors} bit errors in {total_bits} noiseless bits across all presets"),
    )
}

fn check_determinism() -> CheckReport {
    let base = SimConfig {
        n_total: 32,
        cp_len: 8,
        channel_taps: 5,
        snr_start_db: 10.0,
        snr_stop_db: 20.0,
        snr_step_db: 10.0,
        frames_per_point: 40,
        ..SimConfig::default()
    };
    let reference = render_csv(&run_ber_sweep(&base).unwrap());
    let with_threads = render_csv(
        &run_ber_sweep(&SimConfig { workers: 3, ..base }).unwrap(),
    );
    CheckReport::new(
        "worker-count determinism",
        reference == with_threads,
        "CSV bytes identical for 1 and 3 workers".into(),
    )
}

fn check_cost_tables() -> CheckReport {
    let mid = reduction_table(TableScenario::Mid);
    let high = reduction_table(TableScenario::High);
    let ok = mid[0].proposed_reduction == 75.0
        && mid[1].proposed_reduction == 87.5
        && (high[1].proposed_reduction - 2300.0 / 24.0).abs() < 1e-12;
    CheckReport::new(
        "detector cost tables",
        ok,
        "reduction percentages match the closed-form counts".into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let reports = run_selftest();
        assert_eq!(reports.len(), 9);
        for r in &reports {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert!(all_passed(&reports));
    }

    #[test]
    fn failures_are_visible_in_the_aggregate() {
        let mut reports = run_selftest();
        reports[0].passed = false;
        assert!(!all_passed(&reports));
    }
}
