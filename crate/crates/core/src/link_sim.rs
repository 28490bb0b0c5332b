//! QPSK Monte Carlo engine.
//!
//! Every sweep point owns a ChaCha stream seeded from the master seed and the
//! point's grid indices, so results do not depend on how points are scheduled
//! across workers. Points are evaluated with a rayon pool of configurable size
//! and collected in grid order.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array_geometry::{steering_vector, ArrayGeometry};
use crate::beamforming::{
    aligned_phases, analog_beamformer, inner, max_sr_an_beamformer, perturbed_beamformer,
    quantize_beamformer,
};
use crate::channel_model::{awgn, build_channels, standard_complex_normal, Scenario};
use crate::error::{Error, Result};
use crate::phase_quantizer::{quantize, sample_qe, PhaseCodebook, QeModel};

/// Monte Carlo effort and seeding for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub symbols_per_point: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub qe_model: QeModel,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            symbols_per_point: 100_000,
            trials: 100_000,
            master_seed: 0,
            qe_model: QeModel::Uniform,
        }
    }
}

impl TrialConfig {
    /// Symbols sent in each trial of a BER point.
    pub fn symbols_per_trial(&self) -> usize {
        self.symbols_per_point.div_ceil(self.trials.max(1)).max(1)
    }
}

/// Mean of per-trial values with its standard error `std / sqrt(trials)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            trials: 0,
        }
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn estimate(&self) -> Estimate {
        let stderr = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr,
            trials: self.count,
        }
    }
}

/// One estimated quantity at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axes: Vec<(String, f64)>,
    pub metric: String,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn push(&mut self, axes: &[(&str, f64)], metric: &str, estimate: Estimate, seed: u64) {
        self.rows.push(SweepRow {
            axes: axes.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            metric: metric.to_owned(),
            estimate: estimate.mean,
            stderr: estimate.stderr,
            trials: estimate.trials,
            seed,
        });
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of a grid point: the master seed hashed together with the point's
/// indices.
pub fn point_seed(master_seed: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(splitmix64(master_seed), |h, &i| splitmix64(h ^ splitmix64(i)))
}

pub fn point_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maps `f` over `items` on `workers` threads, preserving order.
pub fn parallel_map<T, U, F>(items: &[T], workers: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(&f).collect(),
    }
}

/// Gray-mapped unit-energy QPSK: the first bit picks the sign of the in-phase
/// part and the second the sign of the quadrature part, with 0 mapping to +.
pub fn qpsk_modulate(bits: (bool, bool)) -> Complex64 {
    let re = if bits.0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if bits.1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// Minimum-distance QPSK decision on `sample / composite_gain`. A component
/// that is exactly zero decides bit 0.
pub fn qpsk_demodulate(sample: Complex64, composite_gain: Complex64) -> Result<(bool, bool)> {
    if composite_gain.norm_sqr() == 0.0 {
        return Err(Error::ZeroGain);
    }
    // multiplying by the conjugate keeps the decision regions and skips the division
    let z = sample * composite_gain.conj();
    Ok((z.re < 0.0, z.im < 0.0))
}

/// Bit errors over `symbols` QPSK symbols through
/// `y = signal_gain·s + an_gain·z + n`, with `z ~ CN(0, 1)` and
/// `n ~ CN(0, sigma2)`, detected coherently with `signal_gain`.
pub fn count_bit_errors<R: Rng + ?Sized>(
    signal_gain: Complex64,
    an_gain: Complex64,
    sigma2: f64,
    symbols: usize,
    rng: &mut R,
) -> Result<u64> {
    let mut errors = 0u64;
    for _ in 0..symbols {
        let word: u8 = rng.random();
        let bits = (word & 1 != 0, word & 2 != 0);
        let y = signal_gain * qpsk_modulate(bits) + an_gain * standard_complex_normal(rng)
            + awgn(sigma2, rng);
        let (b0, b1) = qpsk_demodulate(y, signal_gain)?;
        errors += u64::from(b0 != bits.0) + u64::from(b1 != bits.1);
    }
    Ok(errors)
}

/// Where the BER is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Receiver {
    /// Single-antenna probe at the given direction. It sees Alice through the
    /// Alice→Eve path gain and the AN through the nominal Bob→Eve channel.
    Probe(f64),
    /// Bob at the desired direction, with self-interference.
    Bob,
}

/// Bit error rate at `receiver` averaged over independent trials. Each trial
/// draws a fresh self-interference channel, solves the AN beamformer against
/// the ideal Alice beamformer, applies quantization error when a codebook is
/// given (`None` means ideal phases), and sends
/// [`TrialConfig::symbols_per_trial`] symbols.
pub fn simulate_probe_ber<R: Rng + ?Sized>(
    receiver: Receiver,
    scenario: &Scenario,
    codebook: Option<&PhaseCodebook>,
    trial: &TrialConfig,
    rng: &mut R,
) -> Result<Estimate> {
    let alice = scenario.alice_geometry()?;
    let phases = aligned_phases(&alice, scenario.angle_ab);
    let v_ideal = analog_beamformer(&phases);
    let probe_channel = match receiver {
        Receiver::Probe(theta) => Some(steering_vector(&alice, theta).into_entries()),
        Receiver::Bob => None,
    };
    let quantized_fixed = match (codebook, trial.qe_model) {
        (Some(cb), QeModel::Deterministic) => Some(quantize_beamformer(&phases, cb).0),
        _ => None,
    };
    let symbols = trial.symbols_per_trial();
    let mut stats = RunningStats::default();
    for _ in 0..trial.trials.max(1) {
        let channels = build_channels(scenario, rng)?;
        let v_b = max_sr_an_beamformer(&channels, scenario, &v_ideal)?;
        let v_tx = match (codebook, &quantized_fixed) {
            (None, _) => v_ideal.clone(),
            (Some(_), Some(fixed)) => fixed.clone(),
            (Some(cb), None) => perturbed_beamformer(&phases, cb, rng).0,
        };
        let (signal_gain, an_gain) = match &probe_channel {
            Some(h) => (
                (channels.g_ae * scenario.power_alice).sqrt() * inner(h, &v_tx),
                (channels.g_be * scenario.power_bob).sqrt() * inner(&channels.h_be, &v_b),
            ),
            None => (
                (channels.g_ab * scenario.power_alice).sqrt() * inner(&channels.h_ab, &v_tx),
                (scenario.self_interference * scenario.power_bob).sqrt()
                    * inner(&channels.h_bb, &v_b),
            ),
        };
        let ber = if signal_gain.norm_sqr() == 0.0 {
            // nothing to detect: every bit is a coin flip
            0.5
        } else {
            let errors =
                count_bit_errors(signal_gain, an_gain, scenario.noise_power, symbols, rng)?;
            errors as f64 / (2 * symbols) as f64
        };
        stats.push(ber);
    }
    Ok(stats.estimate())
}

/// Monte Carlo SINR loss in dB, `-10·log10(mean |Σ exp(jΔα_n)|² / N²)`.
///
/// Under [`QeModel::Uniform`] the errors are independent uniform draws. Under
/// [`QeModel::Deterministic`] each trial draws a desired direction uniformly
/// on `[0, 2π)` and quantizes the aligned phases with the codebook. The
/// standard error is propagated to dB to first order.
pub fn monte_carlo_sinr_loss<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    codebook: &PhaseCodebook,
    trials: usize,
    model: QeModel,
    rng: &mut R,
) -> Estimate {
    let n = geometry.num_elements();
    let mut stats = RunningStats::default();
    for _ in 0..trials.max(1) {
        let mut sum = Complex64::new(0.0, 0.0);
        match model {
            QeModel::Uniform => {
                for _ in 0..n {
                    let (s, c) = sample_qe(codebook, rng).value().sin_cos();
                    sum += Complex64::new(c, s);
                }
            }
            QeModel::Deterministic => {
                let theta = rng.random_range(0.0..TAU);
                for p in aligned_phases(geometry, theta) {
                    let (s, c) = quantize(p, codebook).1.value().sin_cos();
                    sum += Complex64::new(c, s);
                }
            }
        }
        stats.push(sum.norm_sqr() / (n * n) as f64);
    }
    let ratio = stats.estimate();
    Estimate {
        mean: -10.0 * ratio.mean.log10(),
        stderr: 10.0 / std::f64::consts::LN_10 * ratio.stderr / ratio.mean,
        trials: ratio.trials,
    }
}

/// SINR loss in dB of the deterministic quantizer for one desired direction.
pub fn deterministic_alignment_loss(
    geometry: &ArrayGeometry,
    theta_d: f64,
    codebook: &PhaseCodebook,
) -> f64 {
    let n = geometry.num_elements() as f64;
    let sum: Complex64 = aligned_phases(geometry, theta_d)
        .into_iter()
        .map(|p| Complex64::from_polar(1.0, quantize(p, codebook).1.value()))
        .sum();
    -10.0 * (sum.norm_sqr() / (n * n)).log10()
}
