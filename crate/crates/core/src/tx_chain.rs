//! Transmit chain: subblock assembly, two-user superposition, and the
//! IFFT + cyclic-prefix step.
//!
//! Each user builds a frequency-domain frame of `N` subcarriers from `G`
//! subblock payloads, the two frames are superimposed with a power split,
//! and the composite is moved to the time domain with a unitary inverse
//! transform plus a cyclic prefix.

use crate::constellation::Constellation;
use crate::fft::Dft;
use crate::im_mapping::{IndexLookupTable, SubblockPayload};
use crate::{Complex64, Error};

/// Frame geometry: `n_total` subcarriers split into equal subblocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    n_total: usize,
    subblock_len: usize,
}

impl FrameLayout {
    pub fn new(n_total: usize, subblock_len: usize) -> Result<Self, Error> {
        if n_total == 0 || subblock_len == 0 || n_total % subblock_len != 0 {
            return Err(Error::InvalidFrameLayout { n_total, subblock_len });
        }
        Ok(Self { n_total, subblock_len })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn subblock_len(&self) -> usize {
        self.subblock_len
    }

    pub fn num_subblocks(&self) -> usize {
        self.n_total / self.subblock_len
    }

    /// Subcarrier range of subblock `g`.
    pub fn subblock_range(&self, g: usize) -> std::ops::Range<usize> {
        let start = g * self.subblock_len;
        start..start + self.subblock_len
    }
}

/// Power split between the superposed users. The near user takes the
/// fraction `gamma`, which must stay strictly below one half so the far
/// user always holds the larger share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    gamma: f64,
    total_power: f64,
}

impl SuperpositionSpec {
    pub fn new(gamma: f64, total_power: f64) -> Result<Self, Error> {
        if !(gamma > 0.0 && gamma < 0.5) {
            return Err(Error::InvalidPowerSplit(gamma));
        }
        if !(total_power > 0.0 && total_power.is_finite()) {
            return Err(Error::InvalidTotalPower(total_power));
        }
        Ok(Self { gamma, total_power })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Power allocated to the near user, `gamma * total`.
    pub fn near_power(&self) -> f64 {
        self.gamma * self.total_power
    }

    /// Power allocated to the far user, `(1 - gamma) * total`.
    pub fn far_power(&self) -> f64 {
        (1.0 - self.gamma) * self.total_power
    }

    /// Amplitude applied to the near user's frame.
    pub fn near_scale(&self) -> f64 {
        self.near_power().sqrt()
    }

    /// Amplitude applied to the far user's frame.
    pub fn far_scale(&self) -> f64 {
        self.far_power().sqrt()
    }
}

/// Writes one subblock into `out`: zeros everywhere except the active
/// indices, which carry the payload's symbols in rank order.
///
/// # Panics
/// Panics if `out.len()` differs from the table's subblock length.
pub fn build_subblock(
    payload: SubblockPayload,
    table: &IndexLookupTable,
    alphabet: &Constellation,
    out: &mut [Complex64],
) {
    assert_eq!(out.len(), table.n(), "subblock buffer length mismatch");
    out.fill(Complex64::new(0.0, 0.0));
    let bits = alphabet.bits_per_symbol();
    let k = table.k();
    for (rank, &idx) in table.active_indices(payload.index_word).iter().enumerate() {
        out[idx] = alphabet.point(payload.symbol_at(k, bits, rank));
    }
}

/// Builds a user's full frequency-domain frame from per-subblock payloads.
///
/// # Panics
/// Panics if the payload count differs from the layout's subblock count or
/// the table's subblock length differs from the layout's.
pub fn build_user_frame(
    payloads: &[SubblockPayload],
    table: &IndexLookupTable,
    alphabet: &Constellation,
    layout: FrameLayout,
) -> Vec<Complex64> {
    assert_eq!(payloads.len(), layout.num_subblocks(), "one payload per subblock");
    assert_eq!(table.n(), layout.subblock_len(), "table/layout subblock mismatch");
    let mut frame = vec![Complex64::new(0.0, 0.0); layout.n_total()];
    for (g, payload) in payloads.iter().enumerate() {
        build_subblock(*payload, table, alphabet, &mut frame[layout.subblock_range(g)]);
    }
    frame
}

/// Superimposes the two users' frames subcarrier by subcarrier:
/// `sqrt(gamma P) * near + sqrt((1-gamma) P) * far`.
///
/// # Panics
/// Panics if the frames have different lengths.
pub fn superimpose(
    near: &[Complex64],
    far: &[Complex64],
    spec: SuperpositionSpec,
) -> Vec<Complex64> {
    assert_eq!(near.len(), far.len(), "frames must align");
    let (a, b) = (spec.near_scale(), spec.far_scale());
    near.iter()
        .zip(far)
        .map(|(xa, xb)| a * xa + b * xb)
        .collect()
}

/// A time-domain frame: cyclic prefix followed by the transform body.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrame {
    /// `cp_len + n_total` samples; the first `cp_len` replicate the tail.
    pub samples: Vec<Complex64>,
    pub cp_len: usize,
}

impl TimeFrame {
    /// The transform body, without the prefix.
    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.cp_len..]
    }
}

/// Unitary inverse transform plus cyclic prefix.
///
/// # Panics
/// Panics if `freq.len()` differs from the plan length or `cp_len` exceeds
/// it.
pub fn ifft_with_cp(freq: &[Complex64], dft: &Dft, cp_len: usize) -> TimeFrame {
    assert_eq!(freq.len(), dft.len(), "frame length must match the plan");
    assert!(cp_len <= freq.len(), "prefix cannot outgrow the frame");
    let n = freq.len();
    let mut body = freq.to_vec();
    dft.inverse(&mut body);

    let mut samples = Vec::with_capacity(cp_len + n);
    samples.extend_from_slice(&body[n - cp_len..]);
    samples.extend_from_slice(&body);
    TimeFrame { samples, cp_len }
}
