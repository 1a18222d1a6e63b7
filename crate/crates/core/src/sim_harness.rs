//! Reproducible Monte-Carlo BER sweeps over the complete two-user link.
//!
//! One frame is simulated once per transmission variant and shared by
//! every detector that reads that variant: the rotation-aware detectors
//! see the near user transmitting on the quarter-turned alphabet, the
//! cancellation baselines see both users unrotated. Payload bits, channel
//! realizations, and noise are identical across variants, so detector
//! comparisons are paired sample by sample.
//!
//! ## Reproducibility
//!
//! Every random quantity draws from its own counter-based stream of a
//! ChaCha generator keyed by the configured seed:
//!
//! ```text
//! stream id = purpose << 56 | snr_index << 48 | frame_index
//! ```
//!
//! with one purpose per (user, quantity) pair. A frame's randomness
//! depends only on `(seed, snr_index, frame_index)`, never on the worker
//! that happens to process it. Workers cover disjoint contiguous frame
//! ranges and accumulate integer bit/error tallies, whose merge order
//! cannot change sums, so any worker count yields byte-identical output.

use crate::channel::{db_to_linear, ChannelRealization, NoiseModel};
use crate::constellation::Constellation;
use crate::detectors::{
    detect_conventional_ml, detect_proposed, detect_rotated_ml, detect_two_stage_llr_sic,
    DetectorKind, UserLink,
};
use crate::fft::Dft;
use crate::im_mapping::{bits_per_subblock, BitCounts, SubblockPayload, UserParams, UserRole};
use crate::tx_chain::{build_subblock, ifft_with_cp, FrameLayout, SuperpositionSpec};
use crate::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;
use std::thread;

/// How the composite signal travels from transmitter to receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationPath {
    /// Multiply each subcarrier by the channel's frequency response.
    Frequency,
    /// IFFT, cyclic prefix, tap convolution, prefix removal, FFT.
    Time,
}

impl PropagationPath {
    pub fn name(self) -> &'static str {
        match self {
            PropagationPath::Frequency => "freq",
            PropagationPath::Time => "time",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "freq" | "frequency" => Some(PropagationPath::Frequency),
            "time" => Some(PropagationPath::Time),
            _ => None,
        }
    }
}

/// Named parameter presets covering the reference operating points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Both users activate 3 of 4 subcarriers.
    High,
    /// Both users activate 1 of 4 subcarriers.
    Low,
    /// Near user activates 3, far user 1.
    Hybrid,
    /// Both users activate 2 of 4; only the two rotation-aware detectors
    /// run, to compare them head to head.
    Agreement,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Scenario::High, Scenario::Low, Scenario::Hybrid, Scenario::Agreement];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::High => "high",
            Scenario::Low => "low",
            Scenario::Hybrid => "hybrid",
            Scenario::Agreement => "agreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|sc| sc.name() == s)
    }

    /// Active counts `(k_near, k_far)` the preset selects.
    pub fn active_counts(self) -> (usize, usize) {
        match self {
            Scenario::High => (3, 3),
            Scenario::Low => (1, 1),
            Scenario::Hybrid => (3, 1),
            Scenario::Agreement => (2, 2),
        }
    }

    /// Overwrites the geometry (and for [`Scenario::Agreement`] the
    /// detector list) on a config.
    pub fn apply(self, config: &mut SimConfig) {
        let (k_near, k_far) = self.active_counts();
        config.k_near = k_near;
        config.k_far = k_far;
        if self == Scenario::Agreement {
            config.detectors = vec![DetectorKind::Proposed, DetectorKind::RotatedMl];
        }
    }
}

/// Full sweep configuration. [`SimConfig::default`] carries the reference
/// operating point: 256 subcarriers in subblocks of 4, 12-tap Rayleigh
/// channels with a 16-sample prefix, near user at +4 dB average gain and a
/// 0.1 power fraction, far user at 0 dB, binary modulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_total: usize,
    pub subblock_len: usize,
    pub k_near: usize,
    pub k_far: usize,
    pub mod_order: usize,
    /// Near user's power fraction, strictly inside (0, 0.5).
    pub gamma: f64,
    pub total_power: f64,
    /// Near user's average channel power gain, dB.
    pub gain_near_db: f64,
    /// Far user's average channel power gain, dB.
    pub gain_far_db: f64,
    pub cp_len: usize,
    pub channel_taps: usize,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub frames_per_point: u64,
    pub seed: u64,
    pub detectors: Vec<DetectorKind>,
    pub path: PropagationPath,
    pub workers: usize,
    /// Lets the time path run with a prefix shorter than the delay spread,
    /// to observe the resulting leakage on purpose.
    pub allow_short_cp: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_total: 256,
            subblock_len: 4,
            k_near: 2,
            k_far: 2,
            mod_order: 2,
            gamma: 0.1,
            total_power: 1.0,
            gain_near_db: 4.0,
            gain_far_db: 0.0,
            cp_len: 16,
            channel_taps: 12,
            snr_start_db: 0.0,
            snr_stop_db: 40.0,
            snr_step_db: 2.0,
            frames_per_point: 10_000,
            seed: 1,
            detectors: DetectorKind::ALL.to_vec(),
            path: PropagationPath::Frequency,
            workers: 1,
            allow_short_cp: false,
        }
    }
}

impl SimConfig {
    /// Streams are indexed by an 8-bit SNR slot, so a sweep is capped at
    /// this many points.
    pub const MAX_SNR_POINTS: usize = 256;

    /// Reads a flat `key = value` config file (`#` starts a comment) on
    /// top of the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::default();
        config.apply_str(&text)?;
        Ok(config)
    }

    /// Applies `key = value` lines to this config.
    pub fn apply_str(&mut self, text: &str) -> Result<(), Error> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: idx + 1,
                msg: "expected `key = value`".into(),
            })?;
            self.apply_kv(key.trim(), value.trim(), idx + 1)?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str, line: usize) -> Result<(), Error> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Error>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e| Error::ConfigValue {
                key: key.to_string(),
                msg: format!("cannot parse `{value}`: {e}"),
            })
        }

        match key {
            "n_total" => self.n_total = num(key, value)?,
            "subblock_len" => self.subblock_len = num(key, value)?,
            "k_a" => self.k_near = num(key, value)?,
            "k_b" => self.k_far = num(key, value)?,
            "mod_order" => self.mod_order = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "total_power" => self.total_power = num(key, value)?,
            "gain_a_db" => self.gain_near_db = num(key, value)?,
            "gain_b_db" => self.gain_far_db = num(key, value)?,
            "cp_len" => self.cp_len = num(key, value)?,
            "channel_taps" => self.channel_taps = num(key, value)?,
            "snr_start_db" => self.snr_start_db = num(key, value)?,
            "snr_stop_db" => self.snr_stop_db = num(key, value)?,
            "snr_step_db" => self.snr_step_db = num(key, value)?,
            "frames_per_point" => self.frames_per_point = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "allow_short_cp" => self.allow_short_cp = num(key, value)?,
            "detectors" => {
                self.detectors = if value == "all" {
                    DetectorKind::ALL.to_vec()
                } else {
                    let mut kinds = Vec::new();
                    for part in value.split(',') {
                        let name = part.trim();
                        let kind = DetectorKind::parse(name).ok_or_else(|| Error::ConfigValue {
                            key: key.to_string(),
                            msg: format!(
                                "unknown detector `{name}` (expected all, conventional_ml, \
                                 proposed, rotated_ml, two_stage_llr_sic)"
                            ),
                        })?;
                        if !kinds.contains(&kind) {
                            kinds.push(kind);
                        }
                    }
                    kinds
                };
            }
            "path" => {
                self.path = PropagationPath::parse(value).ok_or_else(|| Error::ConfigValue {
                    key: key.to_string(),
                    msg: format!("unknown path `{value}` (expected freq or time)"),
                })?;
            }
            _ => {
                return Err(Error::ConfigParse {
                    line,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// User parameters for the near user.
    pub fn near_params(&self) -> Result<UserParams, Error> {
        UserParams::new(UserRole::Near, self.subblock_len, self.k_near, self.mod_order)
    }

    /// User parameters for the far user.
    pub fn far_params(&self) -> Result<UserParams, Error> {
        UserParams::new(UserRole::Far, self.subblock_len, self.k_far, self.mod_order)
    }

    /// The sweep's SNR points, `start, start + step, ..., <= stop`.
    pub fn snr_points(&self) -> Vec<f64> {
        let span = self.snr_stop_db - self.snr_start_db;
        if !(self.snr_step_db > 0.0) || span < 0.0 {
            return Vec::new();
        }
        // Absorb float drift so a stop that lands on a step is included.
        let count = (span / self.snr_step_db + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.snr_start_db + i as f64 * self.snr_step_db)
            .collect()
    }

    /// Checks every parameter, building the same objects the sweep will.
    pub fn validate(&self) -> Result<(), Error> {
        FrameLayout::new(self.n_total, self.subblock_len)?;
        let spec = SuperpositionSpec::new(self.gamma, self.total_power)?;
        let near = self.near_params()?;
        let far = self.far_params()?;
        let base = Constellation::for_order(self.mod_order)?;
        UserLink::new(near, base.rotated(std::f64::consts::FRAC_PI_2), spec.near_power())?;
        UserLink::new(far, base.clone(), spec.far_power())?;

        if self.channel_taps == 0 {
            return Err(Error::EmptyChannel);
        }
        if self.channel_taps > self.n_total {
            return Err(Error::ConfigValue {
                key: "channel_taps".into(),
                msg: format!("{} taps exceed {} subcarriers", self.channel_taps, self.n_total),
            });
        }
        if self.cp_len > self.n_total {
            return Err(Error::ConfigValue {
                key: "cp_len".into(),
                msg: format!("prefix of {} exceeds the frame of {}", self.cp_len, self.n_total),
            });
        }
        if self.path == PropagationPath::Time
            && !self.allow_short_cp
            && self.cp_len + 1 < self.channel_taps
        {
            return Err(Error::ShortCyclicPrefix {
                cp_len: self.cp_len,
                taps: self.channel_taps,
            });
        }

        let finite = self.snr_start_db.is_finite()
            && self.snr_stop_db.is_finite()
            && self.snr_step_db.is_finite();
        let points = self.snr_points();
        if !finite || points.is_empty() || points.len() > Self::MAX_SNR_POINTS {
            return Err(Error::InvalidSweep {
                start: self.snr_start_db,
                stop: self.snr_stop_db,
                step: self.snr_step_db,
            });
        }

        if self.workers == 0 {
            return Err(Error::ConfigValue {
                key: "workers".into(),
                msg: "need at least one worker".into(),
            });
        }
        if self.detectors.is_empty() {
            return Err(Error::ConfigValue {
                key: "detectors".into(),
                msg: "need at least one detector".into(),
            });
        }
        Ok(())
    }
}

/// One accumulated sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub user: UserRole,
    pub detector: DetectorKind,
    pub bits_total: u64,
    pub bit_errors: u64,
}

impl BerRecord {
    /// Errors over bits; zero-frame cells report 0.
    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }
}

/// Progress callback payload: one completed SNR point.
#[derive(Debug, Clone, Copy)]
pub struct SweepProgress {
    pub point_index: usize,
    pub total_points: usize,
    pub snr_db: f64,
}

const PURPOSE_PAYLOAD_NEAR: u64 = 0;
const PURPOSE_PAYLOAD_FAR: u64 = 1;
const PURPOSE_CHANNEL_NEAR: u64 = 2;
const PURPOSE_CHANNEL_FAR: u64 = 3;
const PURPOSE_NOISE_NEAR: u64 = 4;
const PURPOSE_NOISE_FAR: u64 = 5;

fn stream_id(purpose: u64, snr_idx: usize, frame: u64) -> u64 {
    debug_assert!(purpose < 256 && snr_idx < 256 && frame < 1 << 48);
    purpose << 56 | (snr_idx as u64) << 48 | frame
}

/// Read-only state shared by all workers of a sweep.
struct SweepContext {
    layout: FrameLayout,
    spec: SuperpositionSpec,
    rot_near: UserLink,
    rot_far: UserLink,
    plain_near: UserLink,
    plain_far: UserLink,
    counts_near: BitCounts,
    counts_far: BitCounts,
    gain_near: f64,
    gain_far: f64,
    needs_rotated: bool,
    needs_plain: bool,
    /// Template generator, keyed by the seed, cloned for every stream.
    base: ChaCha8Rng,
}

impl SweepContext {
    fn build(config: &SimConfig) -> Result<Self, Error> {
        let layout = FrameLayout::new(config.n_total, config.subblock_len)?;
        let spec = SuperpositionSpec::new(config.gamma, config.total_power)?;
        let near = config.near_params()?;
        let far = config.far_params()?;
        let base_alphabet = Constellation::for_order(config.mod_order)?;
        let rotated_alphabet = base_alphabet.rotated(std::f64::consts::FRAC_PI_2);

        Ok(Self {
            layout,
            spec,
            rot_near: UserLink::new(near, rotated_alphabet, spec.near_power())?,
            rot_far: UserLink::new(far, base_alphabet.clone(), spec.far_power())?,
            plain_near: UserLink::new(near, base_alphabet.clone(), spec.near_power())?,
            plain_far: UserLink::new(far, base_alphabet, spec.far_power())?,
            counts_near: bits_per_subblock(near.n, near.k, near.m),
            counts_far: bits_per_subblock(far.n, far.k, far.m),
            gain_near: db_to_linear(config.gain_near_db),
            gain_far: db_to_linear(config.gain_far_db),
            needs_rotated: config.detectors.iter().any(|d| d.uses_rotation()),
            needs_plain: config.detectors.iter().any(|d| !d.uses_rotation()),
            base: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    fn stream(&self, purpose: u64, snr_idx: usize, frame: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(stream_id(purpose, snr_idx, frame));
        rng
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    bits: u64,
    errors: u64,
}

/// Per-worker buffers, reused across that worker's frames.
struct WorkerState {
    dft: Dft,
    ch_near: ChannelRealization,
    ch_far: ChannelRealization,
    payloads_near: Vec<SubblockPayload>,
    payloads_far: Vec<SubblockPayload>,
    frame_near_rot: Vec<Complex64>,
    frame_near_plain: Vec<Complex64>,
    frame_far: Vec<Complex64>,
    composite_rot: Vec<Complex64>,
    composite_plain: Vec<Complex64>,
    noise_near: Vec<Complex64>,
    noise_far: Vec<Complex64>,
    y_rot_near: Vec<Complex64>,
    y_rot_far: Vec<Complex64>,
    y_plain_near: Vec<Complex64>,
    y_plain_far: Vec<Complex64>,
}

impl WorkerState {
    fn new(ctx: &SweepContext, config: &SimConfig) -> Self {
        let n = ctx.layout.n_total();
        let g = ctx.layout.num_subblocks();
        let dft = Dft::new(n);
        // Placeholder draws; every frame re-draws from its own stream.
        let mut init = ChaCha8Rng::seed_from_u64(0);
        let ch_near = ChannelRealization::draw(&mut init, config.channel_taps, ctx.gain_near, &dft)
            .expect("validated");
        let ch_far = ChannelRealization::draw(&mut init, config.channel_taps, ctx.gain_far, &dft)
            .expect("validated");
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        Self {
            dft,
            ch_near,
            ch_far,
            payloads_near: vec![SubblockPayload::default(); g],
            payloads_far: vec![SubblockPayload::default(); g],
            frame_near_rot: zeros.clone(),
            frame_near_plain: zeros.clone(),
            frame_far: zeros.clone(),
            composite_rot: zeros.clone(),
            composite_plain: zeros.clone(),
            noise_near: zeros.clone(),
            noise_far: zeros.clone(),
            y_rot_near: zeros.clone(),
            y_rot_far: zeros.clone(),
            y_plain_near: zeros.clone(),
            y_plain_far: zeros,
        }
    }
}

fn random_payload<R: Rng>(rng: &mut R, counts: BitCounts) -> SubblockPayload {
    SubblockPayload {
        index_word: rng.gen_range(0..1u32 << counts.index_bits),
        symbol_word: rng.gen_range(0..1u32 << counts.symbol_bits),
    }
}

/// Builds a full frequency-domain frame in place.
fn fill_frame(
    payloads: &[SubblockPayload],
    link: &UserLink,
    layout: FrameLayout,
    out: &mut [Complex64],
) {
    for (g, payload) in payloads.iter().enumerate() {
        build_subblock(
            *payload,
            link.table(),
            link.alphabet(),
            &mut out[layout.subblock_range(g)],
        );
    }
}

fn superimpose_into(
    near: &[Complex64],
    far: &[Complex64],
    spec: SuperpositionSpec,
    out: &mut [Complex64],
) {
    let (a, b) = (spec.near_scale(), spec.far_scale());
    for ((out, xa), xb) in out.iter_mut().zip(near).zip(far) {
        *out = a * xa + b * xb;
    }
}

/// Propagates one composite frame to one user's antenna and adds that
/// user's noise.
#[allow(clippy::too_many_arguments)]
fn receive_into(
    composite: &[Complex64],
    ch: &ChannelRealization,
    noise_vec: &[Complex64],
    config: &SimConfig,
    dft: &Dft,
    out: &mut Vec<Complex64>,
) {
    match config.path {
        PropagationPath::Frequency => {
            for (i, o) in out.iter_mut().enumerate() {
                *o = composite[i] * ch.freq_response()[i] + noise_vec[i];
            }
        }
        PropagationPath::Time => {
            let tx = ifft_with_cp(composite, dft, config.cp_len);
            let bins = crate::channel::propagate_time(&tx, ch, dft, config.allow_short_cp)
                .expect("prefix length validated");
            for (i, o) in out.iter_mut().enumerate() {
                *o = bins[i] + noise_vec[i];
            }
        }
    }
}

fn simulate_frame(
    ctx: &SweepContext,
    config: &SimConfig,
    state: &mut WorkerState,
    snr_idx: usize,
    frame: u64,
    noise: NoiseModel,
    tallies: &mut [[Tally; 2]],
) {
    let layout = ctx.layout;
    let g = layout.num_subblocks();

    let mut rng = ctx.stream(PURPOSE_PAYLOAD_NEAR, snr_idx, frame);
    for p in state.payloads_near.iter_mut() {
        *p = random_payload(&mut rng, ctx.counts_near);
    }
    let mut rng = ctx.stream(PURPOSE_PAYLOAD_FAR, snr_idx, frame);
    for p in state.payloads_far.iter_mut() {
        *p = random_payload(&mut rng, ctx.counts_far);
    }

    let mut rng = ctx.stream(PURPOSE_CHANNEL_NEAR, snr_idx, frame);
    state.ch_near.redraw(&mut rng, &state.dft);
    let mut rng = ctx.stream(PURPOSE_CHANNEL_FAR, snr_idx, frame);
    state.ch_far.redraw(&mut rng, &state.dft);

    let mut rng = ctx.stream(PURPOSE_NOISE_NEAR, snr_idx, frame);
    for w in state.noise_near.iter_mut() {
        *w = noise.sample(&mut rng);
    }
    let mut rng = ctx.stream(PURPOSE_NOISE_FAR, snr_idx, frame);
    for w in state.noise_far.iter_mut() {
        *w = noise.sample(&mut rng);
    }

    // The far user's frame is identical in both variants; the near user's
    // frame differs only in the alphabet rotation.
    fill_frame(&state.payloads_far, &ctx.plain_far, layout, &mut state.frame_far);
    if ctx.needs_rotated {
        fill_frame(&state.payloads_near, &ctx.rot_near, layout, &mut state.frame_near_rot);
        superimpose_into(
            &state.frame_near_rot,
            &state.frame_far,
            ctx.spec,
            &mut state.composite_rot,
        );
    }
    if ctx.needs_plain {
        fill_frame(&state.payloads_near, &ctx.plain_near, layout, &mut state.frame_near_plain);
        superimpose_into(
            &state.frame_near_plain,
            &state.frame_far,
            ctx.spec,
            &mut state.composite_plain,
        );
    }

    if ctx.needs_rotated {
        receive_into(&state.composite_rot, &state.ch_near, &state.noise_near, config, &state.dft, &mut state.y_rot_near);
        receive_into(&state.composite_rot, &state.ch_far, &state.noise_far, config, &state.dft, &mut state.y_rot_far);
    }
    if ctx.needs_plain {
        receive_into(&state.composite_plain, &state.ch_near, &state.noise_near, config, &state.dft, &mut state.y_plain_near);
        receive_into(&state.composite_plain, &state.ch_far, &state.noise_far, config, &state.dft, &mut state.y_plain_far);
    }

    let noise_var = noise.variance();
    let h_near = state.ch_near.freq_response();
    let h_far = state.ch_far.freq_response();

    for (d, &kind) in config.detectors.iter().enumerate() {
        let (y_near, y_far) = if kind.uses_rotation() {
            (&state.y_rot_near, &state.y_rot_far)
        } else {
            (&state.y_plain_near, &state.y_plain_far)
        };
        let mut errors = [0u64; 2];
        for gi in 0..g {
            let r = layout.subblock_range(gi);
            let (ya, ha) = (&y_near[r.clone()], &h_near[r.clone()]);
            let (yb, hb) = (&y_far[r.clone()], &h_far[r]);
            let (near_est, far_est) = match kind {
                DetectorKind::Proposed => (
                    detect_proposed(ya, ha, noise_var, &ctx.rot_near, None),
                    detect_proposed(yb, hb, noise_var, &ctx.rot_far, None),
                ),
                DetectorKind::RotatedMl => (
                    detect_rotated_ml(ya, ha, &ctx.rot_near, None),
                    detect_rotated_ml(yb, hb, &ctx.rot_far, None),
                ),
                DetectorKind::ConventionalMl => (
                    detect_conventional_ml(ya, ha, &ctx.plain_near, &ctx.plain_far, None),
                    detect_conventional_ml(yb, hb, &ctx.plain_far, &ctx.plain_near, None),
                ),
                DetectorKind::TwoStageLlrSic => (
                    detect_two_stage_llr_sic(ya, ha, noise_var, &ctx.plain_near, &ctx.plain_far, None),
                    detect_two_stage_llr_sic(yb, hb, noise_var, &ctx.plain_far, &ctx.plain_near, None),
                ),
            };
            errors[0] += near_est.payload.bit_errors(&state.payloads_near[gi]) as u64;
            errors[1] += far_est.payload.bit_errors(&state.payloads_far[gi]) as u64;
        }
        tallies[d][0].bits += g as u64 * ctx.counts_near.total() as u64;
        tallies[d][0].errors += errors[0];
        tallies[d][1].bits += g as u64 * ctx.counts_far.total() as u64;
        tallies[d][1].errors += errors[1];
    }
}

/// Contiguous frame range of worker `w` out of `workers`.
fn worker_range(frames: u64, workers: u64, w: u64) -> (u64, u64) {
    let chunk = frames.div_ceil(workers);
    ((w * chunk).min(frames), ((w + 1) * chunk).min(frames))
}

fn run_point(
    ctx: &SweepContext,
    config: &SimConfig,
    snr_idx: usize,
    noise: NoiseModel,
) -> Vec<[Tally; 2]> {
    let cells = config.detectors.len();
    let frames = config.frames_per_point;
    let workers = (config.workers as u64).min(frames.max(1));

    let partials: Vec<Vec<[Tally; 2]>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (lo, hi) = worker_range(frames, workers, w);
                scope.spawn(move || {
                    let mut tallies = vec![[Tally::default(); 2]; cells];
                    let mut state = WorkerState::new(ctx, config);
                    for frame in lo..hi {
                        simulate_frame(ctx, config, &mut state, snr_idx, frame, noise, &mut tallies);
                    }
                    tallies
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    // Integer sums: merge order cannot affect the totals.
    let mut merged = vec![[Tally::default(); 2]; cells];
    for partial in partials {
        for (m, p) in merged.iter_mut().zip(partial) {
            for u in 0..2 {
                m[u].bits += p[u].bits;
                m[u].errors += p[u].errors;
            }
        }
    }
    merged
}

/// Runs the configured sweep and returns one record per
/// `(snr, user, detector)` cell, sorted by detector name, then user, then
/// SNR.
pub fn run_ber_sweep(config: &SimConfig) -> Result<Vec<BerRecord>, Error> {
    run_ber_sweep_observed(config, |_| {})
}

/// [`run_ber_sweep`] with a callback fired after each completed SNR point.
pub fn run_ber_sweep_observed(
    config: &SimConfig,
    mut on_point: impl FnMut(SweepProgress),
) -> Result<Vec<BerRecord>, Error> {
    config.validate()?;
    let ctx = SweepContext::build(config)?;
    let snrs = config.snr_points();

    let mut records = Vec::with_capacity(snrs.len() * config.detectors.len() * 2);
    for (snr_idx, &snr_db) in snrs.iter().enumerate() {
        let noise = NoiseModel::from_snr_db(config.total_power, snr_db);
        let tallies = if config.frames_per_point == 0 {
            vec![[Tally::default(); 2]; config.detectors.len()]
        } else {
            run_point(&ctx, config, snr_idx, noise)
        };
        for (d, &detector) in config.detectors.iter().enumerate() {
            for (u, user) in [UserRole::Near, UserRole::Far].into_iter().enumerate() {
                records.push(BerRecord {
                    snr_db,
                    user,
                    detector,
                    bits_total: tallies[d][u].bits,
                    bit_errors: tallies[d][u].errors,
                });
            }
        }
        on_point(SweepProgress {
            point_index: snr_idx,
            total_points: snrs.len(),
            snr_db,
        });
    }

    records.sort_by(|a, b| {
        a.detector
            .name()
            .cmp(b.detector.name())
            .then(a.user.cmp(&b.user))
            .then(a.snr_db.total_cmp(&b.snr_db))
    });
    Ok(records)
}

/// Formats a float the way `%g` with six significant digits would:
/// decimal in mid range, scientific outside, trailing zeros trimmed.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        let s = format!("{x:.5e}");
        // "1.23000e-7" -> "1.23e-7"
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

/// Renders records as CSV in the canonical row order (detector name, then
/// user, then SNR).
pub fn render_csv(records: &[BerRecord]) -> String {
    let mut sorted: Vec<&BerRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.detector
            .name()
            .cmp(b.detector.name())
            .then(a.user.cmp(&b.user))
            .then(a.snr_db.total_cmp(&b.snr_db))
    });

    let mut out = String::from("snr_db,user,detector,bits_total,bit_errors,ber\n");
    for r in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_g6(r.snr_db),
            r.user.label(),
            r.detector.name(),
            r.bits_total,
            r.bit_errors,
            fmt_g6(r.ber()),
        );
    }
    out
}

/// Writes [`render_csv`] output to a file.
pub fn write_csv(records: &[BerRecord], path: impl AsRef<Path>) -> Result<(), Error> {
    std::fs::write(path, render_csv(records))?;
    Ok(())
}
