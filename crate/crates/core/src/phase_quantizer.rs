//! `L`-bit phase codebooks and quantization error.
//!
//! The codebook holds the `2^L` phases `2πk/2^L`. Quantization picks the
//! codeword at the smallest circular distance; exact midpoints resolve to the
//! larger codeword modulo 2π. For analysis the error is modeled as uniform on
//! `[-π/2^L, π/2^L]`, whose expected phasor is `sinc(π/2^L)`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_BITS: u32 = 30;

/// How quantization error is produced inside simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QeModel {
    /// Independent draws from the uniform error model.
    #[default]
    Uniform,
    /// Nearest-codeword rounding of the designed phases.
    Deterministic,
}

impl std::fmt::Display for QeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QeModel::Uniform => f.write_str("uniform"),
            QeModel::Deterministic => f.write_str("deterministic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCodebook {
    bits: u32,
    half_step: f64,
}

impl PhaseCodebook {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Codeword `k`, i.e. `2πk/2^L`. Codewords are generated rather than
    /// stored so that 30-bit codebooks stay cheap.
    pub fn codeword(&self, k: u64) -> f64 {
        k as f64 * self.step()
    }

    /// Sorted codewords in `[0, 2π)`.
    pub fn codewords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.codeword(k))
    }

    /// Largest possible error magnitude, `π/2^L`.
    pub fn half_step(&self) -> f64 {
        self.half_step
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_step
    }

    pub fn len(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Signed phase error `quantized - designed`, wrapped to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuantizationError(pub f64);

impl QuantizationError {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn codebook(bits: u32) -> Result<PhaseCodebook> {
    if !(1..=MAX_BITS).contains(&bits) {
        return Err(Error::InvalidBits(bits));
    }
    Ok(PhaseCodebook {
        bits,
        half_step: PI / (1u64 << bits) as f64,
    })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_to_two_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Nearest codeword on the circle and the resulting error.
pub fn quantize(phase: f64, codebook: &PhaseCodebook) -> (f64, QuantizationError) {
    let reduced = wrap_to_two_pi(phase);
    let index = ((reduced / codebook.step() + 0.5).floor() as u64) % codebook.len();
    let codeword = codebook.codeword(index);
    (codeword, QuantizationError(wrap_to_pi(codeword - reduced)))
}

/// One draw from the uniform error model on `[-π/2^L, π/2^L]`.
pub fn sample_qe<R: Rng + ?Sized>(codebook: &PhaseCodebook, rng: &mut R) -> QuantizationError {
    let h = codebook.half_step;
    QuantizationError(rng.random_range(-h..=h))
}

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `E[exp(jΔα)]` under the uniform model. The imaginary part vanishes by
/// symmetry, so the result is real: `sinc(π/2^L)`.
pub fn expected_phasor(codebook: &PhaseCodebook) -> f64 {
    sinc(codebook.half_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_codebooks() {
        let cb1: Vec<f64> = codebook(1).unwrap().codewords().collect();
        assert_eq!(cb1, vec![0.0, PI]);
        let cb2: Vec<f64> = codebook(2).unwrap().codewords().collect();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (a, b) in cb2.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let cb3 = codebook(3).unwrap();
        assert_eq!(cb3.len(), 8);
        let words: Vec<f64> = cb3.codewords().collect();
        for w in words.windows(2) {
            assert!((w[1] - w[0] - PI / 4.0).abs() < 1e-14);
        }
        assert!((cb3.half_step() - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn codebook_bit_range() {
        assert_eq!(codebook(0), Err(Error::InvalidBits(0)));
        assert_eq!(codebook(31), Err(Error::InvalidBits(31)));
        assert_eq!(codebook(30).unwrap().len(), 1 << 30);
    }

    #[test]
    fn wraps_around_zero() {
        let cb = codebook(1).unwrap();
        let (c, e) = quantize(TAU - 0.01, &cb);
        assert_eq!(c, 0.0);
        assert!((e.value() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rounds_to_nearest() {
        let cb = codebook(2).unwrap();
        let (c, e) = quantize(0.3 * PI, &cb);
        assert!((c - PI / 2.0).abs() < 1e-15);
        assert!((e.value() - 0.2 * PI).abs() < 1e-12);
    }

    #[test]
    fn midpoint_goes_up() {
        let cb = codebook(2).unwrap();
        let (c, e) = quantize(PI / 4.0, &cb);
        assert_eq!(c, PI / 2.0);
        assert!((e.value() - PI / 4.0).abs() < 1e-15);
        // the midpoint just below 2π wraps to codeword 0
        let (c, _) = quantize(7.0 * PI / 4.0, &cb);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn negative_phase_is_reduced() {
        let cb = codebook(3).unwrap();
        let (c, e) = quantize(-0.1, &cb);
        assert_eq!(c, 0.0);
        assert!((e.value() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn codewords_are_fixed_points() {
        for bits in 1..=8 {
            let cb = codebook(bits).unwrap();
            for w in cb.codewords() {
                let (c, e) = quantize(w, &cb);
                assert_eq!(c, w);
                assert!(e.value().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((expected_phasor(&codebook(1).unwrap()) - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        assert!((expected_phasor(&codebook(3).unwrap()) - 0.974495).abs() < 1e-6);
        assert!((expected_phasor(&codebook(30).unwrap()) - 1.0).abs() < 1e-15);
        // series and direct forms agree at the switch-over point
        let x = 1e-4;
        assert!((sinc(x * 0.999_999) - x.sin() / x).abs() < 1e-12);
    }

    #[test]
    fn expected_phasor_matches_quadrature() {
        // composite Simpson on the uniform density, independent of sinc()
        for bits in 1..=6 {
            let cb = codebook(bits).unwrap();
            let h = cb.half_step();
            let n = 2000;
            let dx = 2.0 * h / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let x = -h + i as f64 * dx;
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * x.cos();
            }
            let quad = acc * dx / 3.0 / (2.0 * h);
            assert!((quad - expected_phasor(&cb)).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_draws_stay_in_support() {
        let cb = codebook(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let e = sample_qe(&cb, &mut rng).value();
            assert!((-PI / 2.0..=PI / 2.0).contains(&e));
        }
    }

    #[test]
    fn uniform_draw_statistics() {
        let cb = codebook(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut sum, mut re, mut im) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let e = sample_qe(&cb, &mut rng).value();
            sum += e;
            re += e.cos();
            im += e.sin();
        }
        let sigma = cb.half_step() / 3f64.sqrt();
        assert!((sum / n as f64).abs() < 3.0 * sigma / (n as f64).sqrt());
        assert!((re / n as f64 - 0.97450).abs() < 1e-3);
        assert!((im / n as f64).abs() < 1e-3);
    }

    #[test]
    fn expected_phasor_increases_with_bits() {
        let v: Vec<f64> = (1..=30)
            .map(|b| expected_phasor(&codebook(b).unwrap()))
            .collect();
        for w in v.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for w in v[..20].windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
