//! Link budget and channel realizations for the Alice/Bob/Eve geometry.
//!
//! All links are line of sight. Alice's channels to Bob and Eve and Bob's
//! channel to Eve are steering vectors; Bob's self-interference channel is
//! drawn i.i.d. `CN(0, 1)` per realization and scaled by `ρ` in the receive
//! model. Path gain follows `ε / d^c` with `ε` the attenuation at 1 m.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array_geometry::{steering_vector, ArrayGeometry};
use crate::error::{Error, Result};

/// Physical parameters of one link configuration. Powers in watts, distances
/// in meters, angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub power_alice: f64,
    pub power_bob: f64,
    pub dist_ab: f64,
    pub dist_ae: f64,
    pub dist_be: f64,
    /// Desired direction `θ_d`.
    pub angle_ab: f64,
    /// Eavesdropper direction `θ_e`.
    pub angle_ae: f64,
    /// Direction from Bob's transmit subarray toward Eve.
    pub angle_be: f64,
    pub path_loss_exp: f64,
    pub ref_attenuation: f64,
    /// Residual self-interference level `ρ` in `[0, 1]`.
    pub self_interference: f64,
    /// Receiver noise power, identical at Bob and Eve.
    pub noise_power: f64,
    pub n_alice: usize,
    pub n_bob_tx: usize,
    pub n_bob_rx: usize,
    /// Element spacing in wavelengths for both arrays.
    pub spacing_ratio: f64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl Default for Scenario {
    /// 70 dBm at both ends, 500 m links, `c = 2`, `ρ = 0.5`, θ_d = 60°,
    /// θ_e = 120°, Bob→Eve at 45°, 16 Alice antennas, 16 AN antennas and a
    /// 15 dB reference SNR.
    fn default() -> Self {
        let mut s = Self {
            power_alice: dbm_to_watts(70.0),
            power_bob: dbm_to_watts(70.0),
            dist_ab: 500.0,
            dist_ae: 500.0,
            dist_be: 500.0,
            angle_ab: 60f64.to_radians(),
            angle_ae: 120f64.to_radians(),
            angle_be: 45f64.to_radians(),
            path_loss_exp: 2.0,
            ref_attenuation: 1.0,
            self_interference: 0.5,
            noise_power: 0.0,
            n_alice: 16,
            n_bob_tx: 16,
            n_bob_rx: 1,
            spacing_ratio: 0.5,
        };
        s.noise_power = noise_from_snr(15.0, &s);
        s
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidScenario(msg.to_owned()));
        let positive = [
            ("power_alice", self.power_alice),
            ("power_bob", self.power_bob),
            ("dist_ab", self.dist_ab),
            ("dist_ae", self.dist_ae),
            ("dist_be", self.dist_be),
            ("ref_attenuation", self.ref_attenuation),
            ("spacing_ratio", self.spacing_ratio),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.self_interference) {
            return bad("self_interference must lie in [0, 1]");
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return bad("noise_power must be non-negative");
        }
        if !self.path_loss_exp.is_finite() || self.path_loss_exp < 0.0 {
            return bad("path_loss_exp must be non-negative");
        }
        if self.n_alice == 0 || self.n_bob_tx == 0 {
            return bad("antenna counts must be at least 1");
        }
        if self.n_bob_rx != 1 {
            return bad("n_bob_rx must be 1");
        }
        Ok(())
    }

    pub fn g_ab(&self) -> f64 {
        self.ref_attenuation / self.dist_ab.powf(self.path_loss_exp)
    }

    pub fn g_ae(&self) -> f64 {
        self.ref_attenuation / self.dist_ae.powf(self.path_loss_exp)
    }

    pub fn g_be(&self) -> f64 {
        self.ref_attenuation / self.dist_be.powf(self.path_loss_exp)
    }

    pub fn alice_geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_alice, self.spacing_ratio)
    }

    pub fn bob_geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_bob_tx, self.spacing_ratio)
    }

    /// Copy with the noise power set from a reference SNR (see [`noise_from_snr`]).
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.noise_power = noise_from_snr(snr_db, &self);
        self
    }

    /// Copy with a different Alice array size. The noise power is unchanged
    /// because the reference SNR is per antenna.
    pub fn with_n_alice(mut self, n_alice: usize) -> Self {
        self.n_alice = n_alice;
        self
    }
}

/// One realization of every channel in the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_ab: Vec<Complex64>,
    pub h_ae: Vec<Complex64>,
    pub h_be: Vec<Complex64>,
    pub h_bb: Vec<Complex64>,
    pub g_ab: f64,
    pub g_ae: f64,
    pub g_be: f64,
}

/// `ε / d^c`.
pub fn path_gain(distance: f64, path_loss_exp: f64, ref_attenuation: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(ref_attenuation / distance.powf(path_loss_exp))
}

pub fn build_channels<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<ChannelSet> {
    scenario.validate()?;
    let alice = scenario.alice_geometry()?;
    let bob = scenario.bob_geometry()?;
    let h_bb = (0..scenario.n_bob_tx)
        .map(|_| standard_complex_normal(rng))
        .collect();
    Ok(ChannelSet {
        h_ab: steering_vector(&alice, scenario.angle_ab).into_entries(),
        h_ae: steering_vector(&alice, scenario.angle_ae).into_entries(),
        h_be: steering_vector(&bob, scenario.angle_be).into_entries(),
        h_bb,
        g_ab: path_gain(scenario.dist_ab, scenario.path_loss_exp, scenario.ref_attenuation)?,
        g_ae: path_gain(scenario.dist_ae, scenario.path_loss_exp, scenario.ref_attenuation)?,
        g_be: path_gain(scenario.dist_be, scenario.path_loss_exp, scenario.ref_attenuation)?,
    })
}

/// Noise power that puts the per-antenna SNR at Bob, `g_ab P_a / σ²`, at
/// `snr_db`.
pub fn noise_from_snr(snr_db: f64, scenario: &Scenario) -> f64 {
    scenario.g_ab() * scenario.power_alice / db_to_linear(snr_db)
}

/// `CN(0, 1)`: unit total variance, half per real dimension.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Circularly-symmetric complex Gaussian sample with total variance `sigma2`.
pub fn awgn<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> Complex64 {
    if sigma2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    standard_complex_normal(rng) * sigma2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_gain_examples() {
        assert_eq!(path_gain(1.0, 2.0, 1.0).unwrap(), 1.0);
        assert!((path_gain(500.0, 2.0, 1.0).unwrap() - 4e-6).abs() < 1e-18);
        assert_eq!(path_gain(500.0, 0.0, 0.3).unwrap(), 0.3);
        assert_eq!(
            path_gain(0.0, 2.0, 1.0),
            Err(Error::NonPositiveDistance(0.0))
        );
        assert!(path_gain(-3.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn path_gain_decreases_with_distance() {
        let mut last = f64::INFINITY;
        for d in [0.5, 1.0, 10.0, 100.0, 500.0, 1e4] {
            let g = path_gain(d, 2.7, 1.0).unwrap();
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn default_scenario_values() {
        let s = Scenario::default();
        assert!((s.power_alice - 1e4).abs() < 1e-9);
        assert!((s.g_ab() - 4e-6).abs() < 1e-18);
        assert!((s.g_ab() * s.power_alice / s.noise_power - 10f64.powf(1.5)).abs() < 1e-9);
        s.validate().unwrap();
    }

    #[test]
    fn noise_from_snr_examples() {
        let s = Scenario::default();
        let sig = s.g_ab() * s.power_alice;
        assert!((noise_from_snr(0.0, &s) - sig).abs() < 1e-15);
        assert!((noise_from_snr(30.0, &s) - sig * 1e-3).abs() < 1e-15);
        let mut t = s.clone();
        t.power_alice = 4e-2 / t.g_ab();
        assert!((noise_from_snr(10.0, &t) - 4e-3).abs() < 1e-15);
    }

    #[test]
    fn channels_follow_geometry() {
        let mut s = Scenario::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = build_channels(&s, &mut rng).unwrap();
        assert_eq!(ch.h_ab.len(), 16);
        assert_eq!(ch.h_be.len(), 16);
        assert_eq!(ch.h_bb.len(), 16);
        let energy: f64 = ch.h_ab.iter().map(|z| z.norm_sqr()).sum();
        assert!((energy - 16.0).abs() < 1e-12);
        assert!((ch.g_ae - 4e-6).abs() < 1e-18);

        s.angle_ae = s.angle_ab;
        let ch = build_channels(&s, &mut rng).unwrap();
        assert_eq!(ch.h_ab, ch.h_ae);
    }

    #[test]
    fn channels_are_reproducible() {
        let s = Scenario::default();
        let a = build_channels(&s, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = build_channels(&s, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let c = build_channels(&s, &mut ChaCha8Rng::seed_from_u64(100)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.h_bb, c.h_bb);
    }

    #[test]
    fn self_interference_channel_variance() {
        let s = Scenario::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..10_000 {
            let ch = build_channels(&s, &mut rng).unwrap();
            acc += ch.h_bb.iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += ch.h_bb.len();
        }
        let var = acc / count as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn awgn_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(awgn(0.0, &mut rng), Complex64::new(0.0, 0.0));
        let n = 1_000_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let z = awgn(2.0, &mut rng);
            sum += z;
            power += z.norm_sqr();
        }
        let var = power / n as f64;
        assert!((var - 2.0).abs() < 0.02, "{var}");
        let bound = 3.0 * (2.0 / n as f64).sqrt();
        assert!(sum.re.abs() / (n as f64) < bound);
        assert!(sum.im.abs() / (n as f64) < bound);
    }

    #[test]
    fn rejects_invalid_scenarios() {
        let mut s = Scenario::default();
        s.self_interference = 1.5;
        assert!(s.validate().is_err());
        let mut s = Scenario::default();
        s.n_bob_rx = 2;
        assert!(s.validate().is_err());
        let mut s = Scenario::default();
        s.dist_be = 0.0;
        assert!(build_channels(&s, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
