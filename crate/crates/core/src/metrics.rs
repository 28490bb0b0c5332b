//! SINR, quantization loss, achievable rates and secrecy rates.
//!
//! Under the uniform error model the quantized array gain toward the desired
//! direction concentrates at `N·sinc²(π/2^L)`, so the SINR loss is
//! `1/sinc²(π/2^L)` independently of the link budget. The exact finite-array
//! expectation `E|Σ exp(jΔα_n)|²/N = 1 + (N - 1)·sinc²` is exposed alongside.

use num_complex::Complex64;

use crate::beamforming::{inner, BeamformerPair};
use crate::channel_model::{linear_to_db, ChannelSet, Scenario};
use crate::error::{Error, Result};
use crate::phase_quantizer::{expected_phasor, PhaseCodebook};

/// How the quantized beamformer enters the secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecrecyMode {
    /// Ideal phases on both links.
    Nqe,
    /// Bob's gain at its large-array value `N·sinc²`, Eve's gain on the
    /// realized quantized beamformer.
    QeClosedForm,
    /// Bob's gain at `N·sinc²`, Eve's gain at its expectation under the
    /// uniform error model (see [`expected_quantized_gain`]).
    QeExpected,
    /// Both gains on the realized quantized beamformer.
    QeSampled,
}

/// Secrecy-rate objective with Alice's beamformer fixed. `x` and `y` are the
/// AN powers `|h_bbᴴ v_b|²` and `|h_beᴴ v_b|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyObjective {
    bob_signal: f64,
    eve_signal: f64,
    si_scale: f64,
    jam_scale: f64,
    sigma2: f64,
}

impl SecrecyObjective {
    pub fn new(channels: &ChannelSet, scenario: &Scenario, v_a: &[Complex64]) -> Result<Self> {
        check_len(&channels.h_ab, v_a)?;
        check_len(&channels.h_ae, v_a)?;
        let bob_gain = inner(&channels.h_ab, v_a).norm_sqr();
        let eve_gain = inner(&channels.h_ae, v_a).norm_sqr();
        Ok(Self::from_gains(channels, scenario, bob_gain, eve_gain))
    }

    /// Objective with given array gains `|h_abᴴ v_a|²` and `|h_aeᴴ v_a|²`.
    pub fn from_gains(
        channels: &ChannelSet,
        scenario: &Scenario,
        bob_gain: f64,
        eve_gain: f64,
    ) -> Self {
        Self {
            bob_signal: channels.g_ab * scenario.power_alice * bob_gain,
            eve_signal: channels.g_ae * scenario.power_alice * eve_gain,
            si_scale: scenario.self_interference * scenario.power_bob,
            jam_scale: channels.g_be * scenario.power_bob,
            sigma2: scenario.noise_power,
        }
    }

    /// `ρ P_b`.
    pub fn si_scale(&self) -> f64 {
        self.si_scale
    }

    /// Bob's interference plus noise, `M`.
    pub fn bob_interference(&self, x: f64) -> f64 {
        self.si_scale * x + self.sigma2
    }

    /// Eve's interference plus noise, `T`.
    pub fn eve_interference(&self, y: f64) -> f64 {
        self.jam_scale * y + self.sigma2
    }

    pub fn rate_bob(&self, x: f64) -> f64 {
        rate(self.bob_signal, self.si_scale * x, self.sigma2)
    }

    pub fn rate_eve(&self, y: f64) -> f64 {
        rate(self.eve_signal, self.jam_scale * y, self.sigma2)
    }

    /// `R_b - R_e` without the clamp at zero.
    pub fn rate_gap(&self, x: f64, y: f64) -> f64 {
        self.rate_bob(x) - self.rate_eve(y)
    }

    pub fn secrecy_rate(&self, x: f64, y: f64) -> f64 {
        self.rate_gap(x, y).max(0.0)
    }
}

fn check_len(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn an_powers(channels: &ChannelSet, v_b: &[Complex64]) -> Result<(f64, f64)> {
    check_len(&channels.h_bb, v_b)?;
    check_len(&channels.h_be, v_b)?;
    Ok((
        inner(&channels.h_bb, v_b).norm_sqr(),
        inner(&channels.h_be, v_b).norm_sqr(),
    ))
}

/// `log2(1 + S / (I + σ²))`.
pub fn rate(signal: f64, interference: f64, sigma2: f64) -> f64 {
    if signal == 0.0 {
        return 0.0;
    }
    (signal / (interference + sigma2)).ln_1p() / std::f64::consts::LN_2
}

/// Bob's SINR with ideal phases.
pub fn sinr_bob_nqe(
    channels: &ChannelSet,
    scenario: &Scenario,
    beamformers: &BeamformerPair,
) -> Result<f64> {
    check_len(&channels.h_ab, &beamformers.v_a_ideal)?;
    let (x, _) = an_powers(channels, &beamformers.v_b)?;
    let gain = inner(&channels.h_ab, &beamformers.v_a_ideal).norm_sqr();
    Ok(sinr(channels, scenario, gain, x))
}

/// Bob's SINR under quantization with the array gain at `N·sinc²(π/2^L)`.
pub fn sinr_bob_qe_closed_form(
    channels: &ChannelSet,
    scenario: &Scenario,
    beamformers: &BeamformerPair,
    codebook: &PhaseCodebook,
) -> Result<f64> {
    let (x, _) = an_powers(channels, &beamformers.v_b)?;
    let gain = closed_form_gain(channels.h_ab.len(), codebook);
    Ok(sinr(channels, scenario, gain, x))
}

fn sinr(channels: &ChannelSet, scenario: &Scenario, gain: f64, x: f64) -> f64 {
    let m = scenario.self_interference * scenario.power_bob * x + scenario.noise_power;
    channels.g_ab * scenario.power_alice * gain / m
}

/// `N·sinc²(π/2^L)`.
pub fn closed_form_gain(n_alice: usize, codebook: &PhaseCodebook) -> f64 {
    let s = expected_phasor(codebook);
    n_alice as f64 * s * s
}

/// Expected `|hᴴ v_a(α̂)|²` under the uniform error model given the
/// unquantized gain `|hᴴ v_a(α)|²`: `(1 - sinc²) + sinc²·G`.
pub fn expected_quantized_gain(nqe_gain: f64, codebook: &PhaseCodebook) -> f64 {
    let s2 = expected_phasor(codebook).powi(2);
    (1.0 - s2) + s2 * nqe_gain
}

/// SINR loss `10·log10(1/sinc²(π/2^L))` in dB.
pub fn sinr_loss_closed_form(codebook: &PhaseCodebook) -> f64 {
    -20.0 * expected_phasor(codebook).log10()
}

/// SINR loss from the exact expectation for a finite array,
/// `10·log10(N / (1 + (N - 1)·sinc²))` in dB.
pub fn sinr_loss_exact_expectation(codebook: &PhaseCodebook, n_alice: usize) -> f64 {
    let n = n_alice as f64;
    let s2 = expected_phasor(codebook).powi(2);
    linear_to_db(n / (1.0 + (n - 1.0) * s2))
}

/// Secrecy rate `max{0, R_b - R_e}` for the given mode.
pub fn secrecy_rate(
    channels: &ChannelSet,
    scenario: &Scenario,
    beamformers: &BeamformerPair,
    mode: SecrecyMode,
    codebook: &PhaseCodebook,
) -> Result<f64> {
    let (x, y) = an_powers(channels, &beamformers.v_b)?;
    let (bob_gain, eve_gain) = link_gains(channels, beamformers, mode, codebook)?;
    Ok(SecrecyObjective::from_gains(channels, scenario, bob_gain, eve_gain).secrecy_rate(x, y))
}

fn link_gains(
    channels: &ChannelSet,
    bf: &BeamformerPair,
    mode: SecrecyMode,
    codebook: &PhaseCodebook,
) -> Result<(f64, f64)> {
    check_len(&channels.h_ab, &bf.v_a_ideal)?;
    check_len(&channels.h_ab, &bf.v_a_quantized)?;
    check_len(&channels.h_ae, &bf.v_a_ideal)?;
    let n = channels.h_ab.len();
    let gain = |h: &[Complex64], v: &[Complex64]| inner(h, v).norm_sqr();
    Ok(match mode {
        SecrecyMode::Nqe => (
            gain(&channels.h_ab, &bf.v_a_ideal),
            gain(&channels.h_ae, &bf.v_a_ideal),
        ),
        SecrecyMode::QeClosedForm => (
            closed_form_gain(n, codebook),
            gain(&channels.h_ae, &bf.v_a_quantized),
        ),
        SecrecyMode::QeExpected => (
            closed_form_gain(n, codebook),
            expected_quantized_gain(gain(&channels.h_ae, &bf.v_a_ideal), codebook),
        ),
        SecrecyMode::QeSampled => (
            gain(&channels.h_ab, &bf.v_a_quantized),
            gain(&channels.h_ae, &bf.v_a_quantized),
        ),
    })
}

/// Closed-form figures of merit for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub sinr_nqe: f64,
    pub sinr_qe: f64,
    pub gamma_db: f64,
    pub rate_bob: f64,
    pub rate_eve: f64,
    pub sr_nqe: f64,
    pub sr_qe: f64,
    pub interference_m: f64,
    pub interference_t: f64,
}

impl MetricsReport {
    /// Rates are for ideal phases; `sr_qe` uses [`SecrecyMode::QeClosedForm`].
    pub fn evaluate(
        channels: &ChannelSet,
        scenario: &Scenario,
        beamformers: &BeamformerPair,
        codebook: &PhaseCodebook,
    ) -> Result<Self> {
        let (x, y) = an_powers(channels, &beamformers.v_b)?;
        let objective = SecrecyObjective::new(channels, scenario, &beamformers.v_a_ideal)?;
        Ok(Self {
            sinr_nqe: sinr_bob_nqe(channels, scenario, beamformers)?,
            sinr_qe: sinr_bob_qe_closed_form(channels, scenario, beamformers, codebook)?,
            gamma_db: sinr_loss_closed_form(codebook),
            rate_bob: objective.rate_bob(x),
            rate_eve: objective.rate_eve(y),
            sr_nqe: objective.secrecy_rate(x, y),
            sr_qe: secrecy_rate(
                channels,
                scenario,
                beamformers,
                SecrecyMode::QeClosedForm,
                codebook,
            )?,
            interference_m: objective.bob_interference(x),
            interference_t: objective.eve_interference(y),
        })
    }
}
