//! FFT helpers with explicit normalization conventions.
//!
//! Two conventions coexist on purpose:
//!
//! - The signal path is unitary: [`Dft::forward`] and [`Dft::inverse`] both
//!   scale by `1/sqrt(N)`, so a round trip preserves energy exactly.
//! - The channel transform is raw: [`Dft::forward_raw`] applies no scaling,
//!   which maps `L` i.i.d. taps of variance `1/L` onto frequency bins of
//!   unit variance.

use crate::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Planned forward/inverse transforms of a fixed length.
pub struct Dft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Dft {
    /// Plans transforms of length `len`.
    ///
    /// # Panics
    /// Panics if `len` is zero.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: zero-length transforms are rejected at construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unitary forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(&self.forward, buf);
        let scale = 1.0 / (self.len as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Unitary inverse transform, in place.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(&self.inverse, buf);
        let scale = 1.0 / (self.len as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Unscaled forward transform, in place. Used for channel frequency
    /// responses, where the bin variance must equal the summed tap variance.
    pub fn forward_raw(&self, buf: &mut [Complex64]) {
        self.run(&self.forward, buf);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length must match the plan");
        fft.process(buf);
    }
}
