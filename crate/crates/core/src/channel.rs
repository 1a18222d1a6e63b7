//! Multipath Rayleigh channel realizations and complex Gaussian noise.
//!
//! A realization holds `L` i.i.d. complex Gaussian taps of total power
//! `gain` (so each tap has variance `gain / L`) together with the raw
//! `N`-bin DFT of the zero-padded taps. With that convention every
//! frequency bin is complex Gaussian of variance `gain`, which is exactly
//! the per-subcarrier power gain the link budget assigns to a user.
//!
//! Two propagation paths are provided and agree to numerical precision as
//! long as the cyclic prefix covers the delay spread:
//!
//! - [`propagate_freq`]: multiply each subcarrier by its frequency bin.
//! - [`propagate_time`]: linearly convolve the prefixed time frame with the
//!   taps, drop the prefix, and apply the unitary forward transform.
//!
//! Noise is added per frequency bin, outside these helpers, so both paths
//! can share one noise vector.

use crate::fft::Dft;
use crate::tx_chain::TimeFrame;
use crate::{Complex64, Error};
use rand::Rng;
use rand_distr::StandardNormal;

/// Converts a dB power value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power value to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// One user's block-fading channel state.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    taps: Vec<Complex64>,
    freq: Vec<Complex64>,
    gain: f64,
}

impl ChannelRealization {
    /// Draws `num_taps` i.i.d. complex Gaussian taps of total power `gain`
    /// and computes the frequency response on the plan's bins.
    ///
    /// # Panics
    /// Panics if the tap count exceeds the transform length or `gain` is
    /// not positive and finite.
    pub fn draw<R: Rng + ?Sized>(
        rng: &mut R,
        num_taps: usize,
        gain: f64,
        dft: &Dft,
    ) -> Result<Self, Error> {
        if num_taps == 0 {
            return Err(Error::EmptyChannel);
        }
        assert!(num_taps <= dft.len(), "more taps than subcarriers");
        assert!(gain > 0.0 && gain.is_finite(), "gain must be positive and finite");
        let mut ch = Self {
            taps: vec![Complex64::new(0.0, 0.0); num_taps],
            freq: vec![Complex64::new(0.0, 0.0); dft.len()],
            gain,
        };
        ch.redraw(rng, dft);
        Ok(ch)
    }

    /// Replaces the taps and frequency response in place with a fresh draw.
    pub fn redraw<R: Rng + ?Sized>(&mut self, rng: &mut R, dft: &Dft) {
        assert_eq!(self.freq.len(), dft.len(), "plan length changed");
        // Per-component deviation for CN(0, gain / L) taps.
        let sigma = (self.gain / (2.0 * self.taps.len() as f64)).sqrt();
        for tap in &mut self.taps {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *tap = Complex64::new(sigma * re, sigma * im);
        }
        self.freq[..self.taps.len()].copy_from_slice(&self.taps);
        self.freq[self.taps.len()..].fill(Complex64::new(0.0, 0.0));
        dft.forward_raw(&mut self.freq);
    }

    /// Impulse-response taps.
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Per-subcarrier frequency response, one entry per transform bin.
    pub fn freq_response(&self) -> &[Complex64] {
        &self.freq
    }

    /// Average power gain (the summed tap variance).
    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }
}

/// Complex white Gaussian noise of fixed per-bin variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    /// Variance floor. Requested variances below this (including the
    /// "noiseless" limit of very high SNR) are clamped so that LLR
    /// divisions by the noise variance stay finite.
    pub const MIN_VARIANCE: f64 = 1e-12;

    /// Noise for a given SNR where `snr_db = 10 log10(total_power /
    /// variance)`.
    pub fn from_snr_db(total_power: f64, snr_db: f64) -> Self {
        Self::with_variance(total_power * db_to_linear(-snr_db))
    }

    /// Noise of explicit variance, clamped to [`Self::MIN_VARIANCE`].
    pub fn with_variance(variance: f64) -> Self {
        assert!(variance.is_finite() && variance >= 0.0, "variance must be finite and non-negative");
        Self { variance: variance.max(Self::MIN_VARIANCE) }
    }

    /// Per-bin complex variance.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// One complex noise sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let sigma = (self.variance / 2.0).sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sigma * re, sigma * im)
    }

    /// Adds independent noise to every entry of `buf`.
    pub fn add_to<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v += self.sample(rng);
        }
    }
}

/// Frequency-domain propagation: `y_q = h_q * x_q`, bin by bin.
///
/// # Panics
/// Panics if the frame length differs from the response length.
pub fn propagate_freq(freq_frame: &[Complex64], channel: &ChannelRealization) -> Vec<Complex64> {
    assert_eq!(freq_frame.len(), channel.freq_response().len(), "frame/response mismatch");
    freq_frame
        .iter()
        .zip(channel.freq_response())
        .map(|(x, h)| x * h)
        .collect()
}

/// Full linear convolution; the result has `signal.len() + taps.len() - 1`
/// samples.
pub fn convolve(signal: &[Complex64], taps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); signal.len() + taps.len() - 1];
    for (i, s) in signal.iter().enumerate() {
        for (l, h) in taps.iter().enumerate() {
            out[i + l] += s * h;
        }
    }
    out
}

/// Drops `cp_len` leading samples and applies the unitary forward
/// transform to the next `dft.len()` samples.
///
/// # Panics
/// Panics if fewer than `cp_len + dft.len()` samples are available.
pub fn remove_cp_fft(rx: &[Complex64], cp_len: usize, dft: &Dft) -> Vec<Complex64> {
    assert!(rx.len() >= cp_len + dft.len(), "received frame too short");
    let mut bins = rx[cp_len..cp_len + dft.len()].to_vec();
    dft.forward(&mut bins);
    bins
}

/// Time-domain propagation: convolve with the taps, strip the prefix, and
/// return the noiseless frequency bins.
///
/// Fails with [`Error::ShortCyclicPrefix`] when the prefix cannot absorb
/// the delay spread, unless `allow_short_cp` is set (useful for observing
/// inter-block leakage on purpose).
pub fn propagate_time(
    frame: &TimeFrame,
    channel: &ChannelRealization,
    dft: &Dft,
    allow_short_cp: bool,
) -> Result<Vec<Complex64>, Error> {
    if !allow_short_cp && frame.cp_len + 1 < channel.num_taps() {
        return Err(Error::ShortCyclicPrefix {
            cp_len: frame.cp_len,
            taps: channel.num_taps(),
        });
    }
    let rx = convolve(&frame.samples, channel.taps());
    Ok(remove_cp_fft(&rx, frame.cp_len, dft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx_chain::ifft_with_cp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn db_conversions_round_trip() {
        assert!((db_to_linear(4.0) - 2.5118864315095806).abs() < 1e-15);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((linear_to_db(db_to_linear(-7.3)) + 7.3).abs() < 1e-12);
    }

    #[test]
    fn freq_response_is_the_raw_dft_of_the_taps() {
        let dft = Dft::new(16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = ChannelRealization::draw(&mut rng, 4, 1.0, &dft).unwrap();

        // Bin 0 is the plain tap sum; bin q is the phase-weighted sum.
        let sum: Complex64 = ch.taps().iter().sum();
        assert!((ch.freq_response()[0] - sum).norm() < 1e-12);

        let q = 5;
        let mut want = Complex64::new(0.0, 0.0);
        for (l, h) in ch.taps().iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (q * l) as f64 / 16.0;
            want += h * Complex64::from_polar(1.0, phase);
        }
        assert!((ch.freq_response()[q] - want).norm() < 1e-12);
    }

    #[test]
    fn tap_and_bin_power_match_the_configured_gain() {
        let dft = Dft::new(64);
        let gain = db_to_linear(4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ch = ChannelRealization::draw(&mut rng, 12, gain, &dft).unwrap();

        let draws = 4000;
        let mut tap_power = 0.0;
        let mut bin_power = 0.0;
        for _ in 0..draws {
            ch.redraw(&mut rng, &dft);
            tap_power += ch.taps().iter().map(|t| t.norm_sqr()).sum::<f64>();
            bin_power += ch.freq_response()[17].norm_sqr();
        }
        let tap_power = tap_power / draws as f64; // summed over taps
        let bin_power = bin_power / draws as f64;

        // Relative standard error ~ 1/sqrt(draws * 12) and 1/sqrt(draws);
        // the seed is fixed, so these are deterministic checks.
        assert!((tap_power / gain - 1.0).abs() < 0.05, "tap power {tap_power}");
        assert!((bin_power / gain - 1.0).abs() < 0.10, "bin power {bin_power}");
    }

    #[test]
    fn convolution_matches_a_hand_example() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let b = [Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)];
        let out = convolve(&a, &b);
        let want = [3.0, 10.0, 8.0];
        assert_eq!(out.len(), 3);
        for (got, want) in out.iter().zip(want) {
            assert!((got.re - want).abs() < 1e-15 && got.im == 0.0);
        }
    }

    #[test]
    fn time_and_frequency_paths_agree_when_the_prefix_covers_the_taps() {
        let n = 32;
        let dft = Dft::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = ChannelRealization::draw(&mut rng, 5, 1.7, &dft).unwrap();

        let freq_frame: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();

        let direct = propagate_freq(&freq_frame, &ch);
        let tx = ifft_with_cp(&freq_frame, &dft, 8);
        let through_time = propagate_time(&tx, &ch, &dft, false).unwrap();

        for (a, b) in direct.iter().zip(&through_time) {
            assert!((a - b).norm() < 1e-10, "paths diverged: {a} vs {b}");
        }
    }

    #[test]
    fn short_prefix_is_rejected_unless_explicitly_allowed() {
        let dft = Dft::new(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = ChannelRealization::draw(&mut rng, 6, 1.0, &dft).unwrap();
        let freq = vec![Complex64::new(1.0, 0.0); 16];
        let tx = ifft_with_cp(&freq, &dft, 3); // needs cp >= 5

        assert!(matches!(
            propagate_time(&tx, &ch, &dft, false),
            Err(Error::ShortCyclicPrefix { cp_len: 3, taps: 6 })
        ));
        assert!(propagate_time(&tx, &ch, &dft, true).is_ok());
    }

    #[test]
    fn noise_variance_tracks_the_snr_and_respects_the_floor() {
        let noise = NoiseModel::from_snr_db(1.0, 10.0);
        assert!((noise.variance() - 0.1).abs() < 1e-15);

        let scaled = NoiseModel::from_snr_db(2.0, 3.0);
        assert!((scaled.variance() - 2.0 * db_to_linear(-3.0)).abs() < 1e-15);

        // Far beyond the floor: clamps instead of reaching denormals.
        let clean = NoiseModel::from_snr_db(1.0, 200.0);
        assert_eq!(clean.variance(), NoiseModel::MIN_VARIANCE);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noise = NoiseModel::with_variance(0.25);
        let samples = 20_000;
        let mean_power: f64 =
            (0..samples).map(|_| noise.sample(&mut rng).norm_sqr()).sum::<f64>()
                / samples as f64;
        assert!((mean_power / 0.25 - 1.0).abs() < 0.03, "mean power {mean_power}");
    }
}
