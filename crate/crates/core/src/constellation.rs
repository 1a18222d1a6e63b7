//! Gray-coded constellation alphabets with exact axis rotations.
//!
//! All alphabets are normalized to unit average symbol energy. Rotation by a
//! quarter turn is computed exactly (swap/negate, no trigonometry), because
//! the direct per-user detectors rely on the rotated near-user alphabet
//! being *exactly* orthogonal to the far-user alphabet: for BPSK,
//! `Re(a * conj(b)) == 0.0` must hold bit for bit, otherwise residual
//! cross-terms masquerade as interference at high SNR.

use crate::{Complex64, Error};
use std::f64::consts::{FRAC_PI_2, PI};

/// A modulation alphabet, addressed by Gray-coded symbol index.
#[derive(Debug, Clone)]
pub struct Constellation {
    points: Vec<Complex64>,
    rotation: f64,
}

impl Constellation {
    /// Binary phase alphabet `{+1, -1}`, exact on the real axis.
    pub fn bpsk() -> Self {
        Self {
            points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            rotation: 0.0,
        }
    }

    /// Gray-coded M-PSK on the unit circle, first point at phase zero.
    pub fn gray_psk(m: usize) -> Result<Self, Error> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidModOrder(m));
        }
        let mut points = vec![Complex64::new(0.0, 0.0); m];
        for step in 0..m {
            let gray = step ^ (step >> 1);
            points[gray] = unit_phase(step, m);
        }
        Ok(Self { points, rotation: 0.0 })
    }

    /// Gray-coded square M-QAM (M = 4, 16, 64, ...), unit average energy.
    /// The high half of the symbol index selects the in-phase level.
    pub fn gray_qam(m: usize) -> Result<Self, Error> {
        if m < 4 || !m.is_power_of_two() || m.trailing_zeros() % 2 != 0 {
            return Err(Error::InvalidModOrder(m));
        }
        let side = 1usize << (m.trailing_zeros() / 2);
        let side_bits = m.trailing_zeros() / 2;

        // Gray-coded PAM per axis: level position l carries label gray(l).
        let mut pam = vec![0.0; side];
        for l in 0..side {
            let gray = l ^ (l >> 1);
            pam[gray] = (2 * l) as f64 - (side - 1) as f64;
        }

        let mut points = Vec::with_capacity(m);
        for s in 0..m {
            let i_label = s >> side_bits;
            let q_label = s & (side - 1);
            points.push(Complex64::new(pam[i_label], pam[q_label]));
        }
        let mean_energy: f64 =
            points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        let scale = 1.0 / mean_energy.sqrt();
        for p in &mut points {
            *p *= scale;
        }
        Ok(Self { points, rotation: 0.0 })
    }

    /// Default alphabet for a modulation order: BPSK for 2, Gray PSK for 4
    /// and other odd powers of two, square Gray QAM when `log2(m)` is even.
    pub fn for_order(m: usize) -> Result<Self, Error> {
        match m {
            0 | 1 => Err(Error::InvalidModOrder(m)),
            2 => Ok(Self::bpsk()),
            4 => Self::gray_psk(4),
            _ if !m.is_power_of_two() => Err(Error::InvalidModOrder(m)),
            _ if m.trailing_zeros() % 2 == 0 => Self::gray_qam(m),
            _ => Self::gray_psk(m),
        }
    }

    /// A copy rotated by `theta` radians.
    ///
    /// Multiples of a quarter turn (`0`, `PI/2`, `PI`, `3*PI/2`, and exact
    /// f64 negatives/multiples thereof) are applied by swapping and negating
    /// components, so axis-aligned points stay exactly axis-aligned.
    pub fn rotated(&self, theta: f64) -> Self {
        let factor = rotation_factor(theta);
        Self {
            points: self.points.iter().map(|p| apply(&factor, *p)).collect(),
            rotation: self.rotation + theta,
        }
    }

    /// Modulation order.
    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Bits per symbol, `log2(order)`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    /// Accumulated rotation in radians.
    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    /// Point for a symbol index.
    ///
    /// # Panics
    /// Panics if `symbol` is out of range.
    pub fn point(&self, symbol: u32) -> Complex64 {
        self.points[symbol as usize]
    }

    /// All points in symbol-index order.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Symbol index of the nearest point (minimum Euclidean distance,
    /// lowest index on ties).
    pub fn nearest(&self, value: Complex64) -> u32 {
        let mut best = 0u32;
        let mut best_d = f64::INFINITY;
        for (s, p) in self.points.iter().enumerate() {
            let d = (value - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = s as u32;
            }
        }
        best
    }
}

/// Rotation factor, with quarter turns kept exact.
enum Factor {
    QuarterTurns(u8),
    General(Complex64),
}

fn rotation_factor(theta: f64) -> Factor {
    // Quarter-turn detection is deliberately an exact f64 comparison: only
    // the canonical constants (and their sums with full turns) qualify.
    let turns = theta / FRAC_PI_2;
    if turns.fract() == 0.0 && turns.abs() <= u32::MAX as f64 && turns * FRAC_PI_2 == theta {
        let q = (turns as i64).rem_euclid(4) as u8;
        Factor::QuarterTurns(q)
    } else {
        Factor::General(Complex64::from_polar(1.0, theta))
    }
}

fn apply(factor: &Factor, p: Complex64) -> Complex64 {
    match factor {
        Factor::QuarterTurns(0) => p,
        Factor::QuarterTurns(1) => Complex64::new(-p.im, p.re),
        Factor::QuarterTurns(2) => Complex64::new(-p.re, -p.im),
        Factor::QuarterTurns(3) => Complex64::new(p.im, -p.re),
        Factor::QuarterTurns(_) => unreachable!(),
        Factor::General(f) => f * p,
    }
}

fn unit_phase(step: usize, m: usize) -> Complex64 {
    // Quarter-turn phases come out exact; everything else goes through
    // from_polar.
    match (4 * step) % m {
        0 if (4 * step) / m % 4 == 0 => Complex64::new(1.0, 0.0),
        0 if (4 * step) / m % 4 == 1 => Complex64::new(0.0, 1.0),
        0 if (4 * step) / m % 4 == 2 => Complex64::new(-1.0, 0.0),
        0 => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, 2.0 * PI * step as f64 / m as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_is_exact_and_unit_energy() {
        let c = Constellation::bpsk();
        assert_eq!(c.point(0), Complex64::new(1.0, 0.0));
        assert_eq!(c.point(1), Complex64::new(-1.0, 0.0));
        assert_eq!(c.bits_per_symbol(), 1);
    }

    #[test]
    fn quarter_turn_of_bpsk_lands_exactly_on_the_imaginary_axis() {
        let rotated = Constellation::bpsk().rotated(FRAC_PI_2);
        assert_eq!(rotated.point(0), Complex64::new(0.0, 1.0));
        assert_eq!(rotated.point(1), Complex64::new(0.0, -1.0));

        // The orthogonality the direct detectors rely on: every cross
        // product between the rotated and unrotated alphabets has exactly
        // zero real part.
        let plain = Constellation::bpsk();
        for a in rotated.points() {
            for b in plain.points() {
                assert_eq!((a * b.conj()).re, 0.0);
            }
        }
    }

    #[test]
    fn quarter_turns_compose_exactly() {
        let c = Constellation::bpsk();
        assert_eq!(c.rotated(PI).point(0), Complex64::new(-1.0, 0.0));
        assert_eq!(c.rotated(3.0 * FRAC_PI_2).point(0), Complex64::new(0.0, -1.0));
        assert_eq!(c.rotated(-FRAC_PI_2).point(0), Complex64::new(0.0, -1.0));
        assert_eq!(c.rotated(2.0 * PI).point(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn general_rotation_falls_back_to_trigonometry() {
        let c = Constellation::bpsk().rotated(PI / 6.0);
        let expect = Complex64::from_polar(1.0, PI / 6.0);
        assert!((c.point(0) - expect).norm() < 1e-15);
        assert!((c.rotation() - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn qpsk_is_gray_coded_on_exact_axes() {
        let c = Constellation::gray_psk(4).unwrap();
        assert_eq!(c.point(0), Complex64::new(1.0, 0.0));
        assert_eq!(c.point(1), Complex64::new(0.0, 1.0));
        assert_eq!(c.point(3), Complex64::new(-1.0, 0.0));
        assert_eq!(c.point(2), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn psk_neighbors_differ_in_one_bit() {
        for m in [4usize, 8, 16] {
            let c = Constellation::gray_psk(m).unwrap();
            for step in 0..m {
                let here = step ^ (step >> 1);
                let next = ((step + 1) % m) ^ (((step + 1) % m) >> 1);
                assert_eq!(
                    (here ^ next).count_ones(),
                    1,
                    "m={m}: phase neighbors {here:0b} and {next:0b}"
                );
                assert!((c.point(here as u32).norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn square_qam_has_unit_mean_energy_and_gray_axes() {
        for m in [4usize, 16, 64] {
            let c = Constellation::gray_qam(m).unwrap();
            let mean: f64 =
                c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
            assert!((mean - 1.0).abs() < 1e-12, "m={m}: mean energy {mean}");
        }

        // 16-QAM: symbols that differ only in the low quadrature bits sit in
        // the same column.
        let c = Constellation::gray_qam(16).unwrap();
        for s in 0..4u32 {
            assert!((c.point(s).re - c.point(0).re).abs() < 1e-15);
        }
        // Horizontal level neighbors differ in one I-label bit.
        let levels = [0b00u32, 0b01, 0b11, 0b10]; // gray walk across columns
        for w in levels.windows(2) {
            let a = c.point(w[0] << 2);
            let b = c.point(w[1] << 2);
            assert!((b.re - a.re) > 0.0, "columns walk left to right");
        }
    }

    #[test]
    fn nearest_recovers_every_symbol() {
        for c in [
            Constellation::bpsk(),
            Constellation::gray_psk(8).unwrap(),
            Constellation::gray_qam(16).unwrap(),
        ] {
            for s in 0..c.order() as u32 {
                let noisy = c.point(s) + Complex64::new(1e-3, -1e-3);
                assert_eq!(c.nearest(noisy), s);
            }
        }
    }

    #[test]
    fn order_dispatch_and_validation() {
        assert_eq!(Constellation::for_order(2).unwrap().order(), 2);
        assert_eq!(Constellation::for_order(4).unwrap().order(), 4);
        assert_eq!(Constellation::for_order(8).unwrap().order(), 8);
        assert_eq!(Constellation::for_order(16).unwrap().order(), 16);
        assert!(Constellation::for_order(6).is_err());
        assert!(Constellation::gray_qam(8).is_err());
        assert!(Constellation::gray_psk(3).is_err());
    }
}
