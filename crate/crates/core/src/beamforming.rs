//! Alice's phase-only analog beamformer and Bob's artificial-noise beamformer.
//!
//! The AN beamformer maximizes the secrecy rate for a fixed `v_a`. The
//! objective depends on `v_b` only through `x = |h_bbᴴ v_b|²` (hurts Bob)
//! and `y = |h_beᴴ v_b|²` (hurts Eve), so the optimum lies in
//! `span{h_bb, h_be}`. With an orthonormal basis `e1 ∝ h_bb`, `e2 ⊥ e1` and
//! the `e1` coefficient phase-aligned to maximize `y`, every candidate is
//! `v(s) = sqrt(s)·u·e1 + sqrt(1 - s)·e2` for a split `s ∈ [0, 1]`, giving
//! `x = ‖h_bb‖² s` and `y = (|β1| sqrt(s) + β2 sqrt(1 - s))²`. The remaining
//! scalar problem is solved by a grid bracket followed by golden-section
//! refinement.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::array_geometry::{phase_profile, ArrayGeometry};
use crate::channel_model::{standard_complex_normal, ChannelSet, Scenario};
use crate::error::{Error, Result};
use crate::metrics::SecrecyObjective;
use crate::phase_quantizer::{
    quantize, sample_qe, wrap_to_two_pi, PhaseCodebook, QeModel, QuantizationError,
};

const SPLIT_TOLERANCE: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 200;
const BRACKET_POINTS: usize = 64;

/// Beamformers used on one link realization.
///
/// `v_a_quantized` holds codebook phases under the deterministic quantizer and
/// model-perturbed phases `α + Δα` under the uniform error model.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerPair {
    pub v_a_ideal: Vec<Complex64>,
    pub v_a_quantized: Vec<Complex64>,
    pub v_b: Vec<Complex64>,
}

impl BeamformerPair {
    /// Aligns Alice to `angle_ab`, applies quantization error per `model`,
    /// and solves the AN beamformer against the unquantized `v_a`.
    pub fn design<R: Rng + ?Sized>(
        channels: &ChannelSet,
        scenario: &Scenario,
        codebook: &PhaseCodebook,
        model: QeModel,
        rng: &mut R,
    ) -> Result<Self> {
        let geometry = scenario.alice_geometry()?;
        let phases = aligned_phases(&geometry, scenario.angle_ab);
        let v_a_ideal = analog_beamformer(&phases);
        let v_a_quantized = match model {
            QeModel::Uniform => perturbed_beamformer(&phases, codebook, rng).0,
            QeModel::Deterministic => quantize_beamformer(&phases, codebook).0,
        };
        let v_b = max_sr_an_beamformer(channels, scenario, &v_a_ideal)?;
        Ok(Self {
            v_a_ideal,
            v_a_quantized,
            v_b,
        })
    }
}

/// Phases `2πΨ_θd(n)` wrapped to `[0, 2π)`; these co-phase Alice with the
/// steering vector toward `theta_d`.
pub fn aligned_phases(geometry: &ArrayGeometry, theta_d: f64) -> Vec<f64> {
    phase_profile(geometry, theta_d)
        .into_iter()
        .map(|psi| wrap_to_two_pi(TAU * psi))
        .collect()
}

/// Constant-envelope weights `exp(jα_n) / sqrt(N)`.
pub fn analog_beamformer(phases: &[f64]) -> Vec<Complex64> {
    let amp = 1.0 / (phases.len() as f64).sqrt();
    phases
        .iter()
        .map(|&a| Complex64::from_polar(amp, a))
        .collect()
}

/// Quantizes every phase to its nearest codeword.
pub fn quantize_beamformer(
    phases: &[f64],
    codebook: &PhaseCodebook,
) -> (Vec<Complex64>, Vec<QuantizationError>) {
    let (quantized, errors): (Vec<f64>, Vec<QuantizationError>) =
        phases.iter().map(|&p| quantize(p, codebook)).unzip();
    (analog_beamformer(&quantized), errors)
}

/// Applies independent uniform-model errors to every phase.
pub fn perturbed_beamformer<R: Rng + ?Sized>(
    phases: &[f64],
    codebook: &PhaseCodebook,
    rng: &mut R,
) -> (Vec<Complex64>, Vec<QuantizationError>) {
    let errors: Vec<QuantizationError> = phases.iter().map(|_| sample_qe(codebook, rng)).collect();
    let perturbed: Vec<f64> = phases
        .iter()
        .zip(&errors)
        .map(|(p, e)| p + e.value())
        .collect();
    (analog_beamformer(&perturbed), errors)
}

/// `hᴴ v`.
pub fn effective_array_gain(h: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if h.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: h.len(),
            right: v.len(),
        });
    }
    Ok(inner(h, v))
}

pub(crate) fn inner(h: &[Complex64], v: &[Complex64]) -> Complex64 {
    h.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scaled(v: &[Complex64], s: Complex64) -> Vec<Complex64> {
    v.iter().map(|z| z * s).collect()
}

/// Some unit vector orthogonal to the unit vector `e1`.
fn orthogonal_unit(e1: &[Complex64]) -> Vec<Complex64> {
    let k = e1
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    // Gram-Schmidt on the standard basis vector least aligned with e1
    let proj = e1[k].conj();
    let mut v: Vec<Complex64> = e1.iter().map(|z| -z * proj).collect();
    v[k] += 1.0;
    let n = norm(&v);
    v.iter().map(|z| z / n).collect()
}

/// Secrecy-rate maximizing AN beamformer for a fixed Alice beamformer `v_a`.
///
/// Returns a unit-norm vector of length `N_b^t`.
pub fn max_sr_an_beamformer(
    channels: &ChannelSet,
    scenario: &Scenario,
    v_a: &[Complex64],
) -> Result<Vec<Complex64>> {
    let objective = SecrecyObjective::new(channels, scenario, v_a)?;
    let h_bb = &channels.h_bb;
    let h_be = &channels.h_be;
    if h_bb.len() != h_be.len() {
        return Err(Error::LengthMismatch {
            left: h_bb.len(),
            right: h_be.len(),
        });
    }
    let n = h_bb.len();
    if n == 1 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let bb_norm = norm(h_bb);
    let be_norm = norm(h_be);
    if be_norm <= f64::MIN_POSITIVE {
        // jamming Eve is impossible, so only the self-interference matters
        if bb_norm <= f64::MIN_POSITIVE {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[0] = Complex64::new(1.0, 0.0);
            return Ok(v);
        }
        let e1: Vec<Complex64> = h_bb.iter().map(|z| z / bb_norm).collect();
        return Ok(orthogonal_unit(&e1));
    }
    if objective.si_scale() == 0.0 || bb_norm <= f64::MIN_POSITIVE {
        return Ok(h_be.iter().map(|z| z / be_norm).collect());
    }

    let e1: Vec<Complex64> = h_bb.iter().map(|z| z / bb_norm).collect();
    let beta1 = inner(&e1, h_be);
    let residual: Vec<Complex64> = h_be
        .iter()
        .zip(&e1)
        .map(|(b, e)| b - beta1 * e)
        .collect();
    let mut beta2 = norm(&residual);
    let e2 = if beta2 <= 1e-12 * be_norm {
        beta2 = 0.0;
        orthogonal_unit(&e1)
    } else {
        residual.iter().map(|z| z / beta2).collect()
    };
    let b1 = beta1.norm();
    let phase = if b1 > 0.0 {
        beta1 / b1
    } else {
        Complex64::new(1.0, 0.0)
    };

    let bb2 = bb_norm * bb_norm;
    let gap = |s: f64| {
        let x = bb2 * s;
        let y = (b1 * s.sqrt() + beta2 * (1.0 - s).sqrt()).powi(2);
        objective.rate_gap(x, y)
    };
    // beyond the y-maximizing split both terms get worse
    let s_max = if b1 == 0.0 {
        0.0
    } else {
        b1 * b1 / (b1 * b1 + beta2 * beta2)
    };
    let s = maximize_on_interval(gap, 0.0, s_max);

    let first = scaled(&e1, phase * s.sqrt());
    Ok(first
        .iter()
        .zip(&e2)
        .map(|(a, b)| a + b * (1.0 - s).sqrt())
        .collect())
}

/// Maximizes `f` on `[lo, hi]`: coarse grid to bracket the best point, then
/// golden-section search inside the bracket. Endpoints stay candidates.
fn maximize_on_interval<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let step = (hi - lo) / BRACKET_POINTS as f64;
    let grid = |i: usize| if i == BRACKET_POINTS { hi } else { lo + i as f64 * step };
    let (best_i, best_v) = (0..=BRACKET_POINTS)
        .map(|i| (i, f(grid(i))))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let a = grid(best_i.saturating_sub(1));
    let b = grid((best_i + 1).min(BRACKET_POINTS));
    let s = golden_section_max(&f, a, b, SPLIT_TOLERANCE, GOLDEN_MAX_ITER);
    if f(s) > best_v {
        s
    } else {
        grid(best_i)
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Brute-force reference for [`max_sr_an_beamformer`]: the best of `samples`
/// isotropically random unit vectors under the clamped secrecy rate.
pub fn an_beamformer_oracle<R: Rng + ?Sized>(
    channels: &ChannelSet,
    scenario: &Scenario,
    v_a: &[Complex64],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let objective = SecrecyObjective::new(channels, scenario, v_a)?;
    let n = channels.h_bb.len();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut candidate = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..samples.max(1) {
        for z in candidate.iter_mut() {
            *z = standard_complex_normal(rng);
        }
        let len = norm(&candidate);
        candidate.iter_mut().for_each(|z| *z /= len);
        let x = inner(&channels.h_bb, &candidate).norm_sqr();
        let y = inner(&channels.h_be, &candidate).norm_sqr();
        let sr = objective.secrecy_rate(x, y);
        if best.as_ref().is_none_or(|(b, _)| sr > *b) {
            best = Some((sr, candidate.clone()));
        }
    }
    Ok(best.map(|(_, v)| v).unwrap_or(candidate))
}
