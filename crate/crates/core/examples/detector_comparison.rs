//! All four detectors on the same noisy frames.
//!
//! Runs a short fixed-seed batch at one SNR and prints, per detector and
//! user, the bit error rate and the measured complex-multiplication
//! count per subblock, so the accuracy/cost trade-off is visible in one
//! table. The two cancellation baselines read the unrotated
//! transmission; the direct detectors read the rotated one.

use ofdm_im_noma::channel::{db_to_linear, ChannelRealization, NoiseModel};
use ofdm_im_noma::constellation::Constellation;
use ofdm_im_noma::detectors::{
    detect_conventional_ml, detect_proposed, detect_rotated_ml, detect_two_stage_llr_sic,
    DetectorKind, OpCounter, UserLink,
};
use ofdm_im_noma::fft::Dft;
use ofdm_im_noma::im_mapping::{SubblockPayload, UserParams, UserRole};
use ofdm_im_noma::tx_chain::{build_subblock, superimpose, SuperpositionSpec};
use ofdm_im_noma::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let snr_db = 24.0;
    let frames = 400;
    let n = 256;
    let (k_near, k_far) = (2, 2);

    let spec = SuperpositionSpec::new(0.1, 1.0).unwrap();
    let base = Constellation::bpsk();
    let rotated = base.rotated(std::f64::consts::FRAC_PI_2);
    let near_params = UserParams::new(UserRole::Near, 4, k_near, 2).unwrap();
    let far_params = UserParams::new(UserRole::Far, 4, k_far, 2).unwrap();
    let rot_near = UserLink::new(near_params, rotated, spec.near_power()).unwrap();
    let rot_far = UserLink::new(far_params, base.clone(), spec.far_power()).unwrap();
    let plain_near = UserLink::new(near_params, base.clone(), spec.near_power()).unwrap();
    let plain_far = UserLink::new(far_params, base, spec.far_power()).unwrap();

    let dft = Dft::new(n);
    let noise = NoiseModel::from_snr_db(1.0, snr_db);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut ch_near = ChannelRealization::draw(&mut rng, 12, db_to_linear(4.0), &dft).unwrap();
    let mut ch_far = ChannelRealization::draw(&mut rng, 12, db_to_linear(0.0), &dft).unwrap();

    let counts = near_params.bit_counts();
    let subblocks = n / 4;
    let mut errors = [[0u64; 2]; 4]; // [detector][user]
    let mut muls = [[OpCounter::default(); 2]; 4];
    let mut subblock_tally = 0u64;

    for _ in 0..frames {
        ch_near.redraw(&mut rng, &dft);
        ch_far.redraw(&mut rng, &dft);
        for g in 0..subblocks {
            let pa = SubblockPayload {
                index_word: rng.gen_range(0..4),
                symbol_word: rng.gen_range(0..1 << k_near),
            };
            let pb = SubblockPayload {
                index_word: rng.gen_range(0..4),
                symbol_word: rng.gen_range(0..1 << k_far),
            };
            let mut x_rot = [Complex64::new(0.0, 0.0); 4];
            let mut x_plain = [Complex64::new(0.0, 0.0); 4];
            let mut x_far = [Complex64::new(0.0, 0.0); 4];
            build_subblock(pa, rot_near.table(), rot_near.alphabet(), &mut x_rot);
            build_subblock(pa, plain_near.table(), plain_near.alphabet(), &mut x_plain);
            build_subblock(pb, rot_far.table(), rot_far.alphabet(), &mut x_far);
            let tx_rot = superimpose(&x_rot, &x_far, spec);
            let tx_plain = superimpose(&x_plain, &x_far, spec);

            // Same channel bins and the same noise for every detector.
            let offset = g * 4;
            let hn = &ch_near.freq_response()[offset..offset + 4];
            let hf = &ch_far.freq_response()[offset..offset + 4];
            let w: Vec<[Complex64; 2]> =
                (0..4).map(|_| [noise.sample(&mut rng), noise.sample(&mut rng)]).collect();
            let rx = |tx: &[Complex64], h: &[Complex64], user: usize| -> Vec<Complex64> {
                (0..4).map(|i| tx[i] * h[i] + w[i][user]).collect()
            };
            let y_rot_n = rx(&tx_rot, hn, 0);
            let y_rot_f = rx(&tx_rot, hf, 1);
            let y_plain_n = rx(&tx_plain, hn, 0);
            let y_plain_f = rx(&tx_plain, hf, 1);

            let var = noise.variance();
            let results = [
                [
                    detect_conventional_ml(&y_plain_n, hn, &plain_near, &plain_far, Some(&mut muls[0][0])),
                    detect_conventional_ml(&y_plain_f, hf, &plain_far, &plain_near, Some(&mut muls[0][1])),
                ],
                [
                    detect_proposed(&y_rot_n, hn, var, &rot_near, Some(&mut muls[1][0])),
                    detect_proposed(&y_rot_f, hf, var, &rot_far, Some(&mut muls[1][1])),
                ],
                [
                    detect_rotated_ml(&y_rot_n, hn, &rot_near, Some(&mut muls[2][0])),
                    detect_rotated_ml(&y_rot_f, hf, &rot_far, Some(&mut muls[2][1])),
                ],
                [
                    detect_two_stage_llr_sic(&y_plain_n, hn, var, &plain_near, &plain_far, Some(&mut muls[3][0])),
                    detect_two_stage_llr_sic(&y_plain_f, hf, var, &plain_far, &plain_near, Some(&mut muls[3][1])),
                ],
            ];
            for (d, row) in results.iter().enumerate() {
                errors[d][0] += row[0].payload.bit_errors(&pa) as u64;
                errors[d][1] += row[1].payload.bit_errors(&pb) as u64;
            }
            subblock_tally += 1;
        }
    }

    let bits = subblock_tally * counts.total() as u64;
    println!(
        "{frames} frames of {subblocks} subblocks at {snr_db} dB SNR, k = {k_near}/{k_far}:\n"
    );
    println!(
        "{:<18} {:>5} {:>12} {:>10} {:>22}",
        "detector", "user", "bit errors", "BER", "complex muls/subblock"
    );
    let kinds = [
        DetectorKind::ConventionalMl,
        DetectorKind::Proposed,
        DetectorKind::RotatedMl,
        DetectorKind::TwoStageLlrSic,
    ];
    for (d, kind) in kinds.iter().enumerate() {
        for (u, label) in ["A", "B"].iter().enumerate() {
            println!(
                "{:<18} {label:>5} {:>12} {:>10.2e} {:>22.1}",
                kind.name(),
                errors[d][u],
                errors[d][u] as f64 / bits as f64,
                muls[d][u].complex_muls as f64 / subblock_tally as f64,
            );
        }
    }
}
