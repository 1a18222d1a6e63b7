//! Link-level simulator and detector library for a two-user downlink that
//! combines OFDM index modulation with power-domain superposition.
//!
//! The carrier frame is split into subblocks of `n` subcarriers of which `k`
//! are active; information travels both in the choice of active indices and
//! in the M-ary symbols placed on them. Two users share every subcarrier
//! through power-domain superposition, and the near user's alphabet is
//! rotated so that the two alphabets occupy orthogonal directions in the
//! complex plane. That rotation is what lets a per-subcarrier LLR detector
//! decode either user directly, without successive interference
//! cancellation.
//!
//! Modules:
//! - [`im_mapping`]: index-bit lookup tables and subblock payload codecs
//! - [`constellation`]: BPSK/QAM/PSK alphabets with exact axis rotations
//! - [`tx_chain`]: subblock assembly, superposition, IFFT + cyclic prefix
//! - [`channel`]: multipath Rayleigh realizations and complex noise
//! - [`detectors`]: joint ML and two-stage LLR detectors, rotated and
//!   SIC-based variants, with complex-multiplication audits
//! - [`complexity`]: closed-form detection cost and reduction tables
//! - [`sim_harness`]: reproducible multi-threaded BER sweeps and CSV output
//! - [`selftest`]: fast end-to-end invariant checks
//!
//! The `examples/` directory exercises each capability end to end; the thin
//! `ofdm-im-noma` binary exposes the same flows as `run`, `table`, and
//! `selftest` subcommands.

pub mod channel;
pub mod complexity;
pub mod constellation;
pub mod detectors;
mod error;
pub mod fft;
pub mod im_mapping;
pub mod selftest;
pub mod sim_harness;
pub mod tx_chain;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;
