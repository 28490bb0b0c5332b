//! TOML experiment configuration.
//!
//! Every key is optional; missing keys fall back to the reference scenario
//! and to per-figure grid and trial defaults. Unknown keys are rejected.
//! Powers are given in dBm and angles in degrees; conversion to watts and
//! radians happens once in [`ScenarioConfig::to_scenario`].

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::channel_model::{dbm_to_watts, Scenario};
use crate::link_sim::TrialConfig;
use crate::phase_quantizer::{QeModel, MAX_BITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {message}")]
    Range { key: String, message: String },
}

impl ConfigError {
    fn range(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Range {
            key: key.to_owned(),
            message: message.into(),
        }
    }

    /// Key path of a range error.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Range { key, .. } => Some(key),
            ConfigError::Parse(_) => None,
        }
    }
}

/// The supported sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    BerSweep,
    SinrVsL,
    SinrVsNa,
    SrVsL,
    SrVsLNa,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::BerSweep,
        Figure::SinrVsL,
        Figure::SinrVsNa,
        Figure::SrVsL,
        Figure::SrVsLNa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::BerSweep => "ber_sweep",
            Figure::SinrVsL => "sinr_vs_l",
            Figure::SinrVsNa => "sinr_vs_na",
            Figure::SrVsL => "sr_vs_l",
            Figure::SrVsLNa => "sr_vs_l_na",
        }
    }

    fn default_grids(self) -> Grids {
        let all_bits: Vec<u32> = (1..=8).collect();
        let (bits, n_alice, snr_db) = match self {
            Figure::BerSweep => (vec![1, 2, 3], vec![16], vec![10.0]),
            Figure::SinrVsL => (all_bits, vec![4, 16, 64, 256], vec![15.0]),
            Figure::SinrVsNa => (
                vec![3, 4, 5],
                vec![2, 4, 8, 16, 32, 64, 128, 256],
                vec![15.0],
            ),
            Figure::SrVsL => (all_bits, vec![16], vec![0.0, 15.0, 30.0]),
            Figure::SrVsLNa => (all_bits, vec![4, 16, 64, 256], vec![0.0, 15.0, 30.0]),
        };
        Grids {
            bits,
            n_alice,
            snr_db,
            angle_step: 1.0,
        }
    }

    fn default_trial(self) -> TrialConfig {
        let trials = match self {
            Figure::BerSweep => 100,
            _ => 100_000,
        };
        TrialConfig {
            symbols_per_point: 100_000,
            trials,
            master_seed: 0,
            qe_model: QeModel::Uniform,
        }
    }
}

impl std::fmt::Display for Figure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Scenario in configuration units: dBm and degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub power_alice: f64,
    pub power_bob: f64,
    pub dist_ab: f64,
    pub dist_ae: f64,
    pub dist_be: f64,
    pub angle_ab: f64,
    pub angle_ae: f64,
    pub angle_be: f64,
    pub path_loss_exp: f64,
    pub ref_attenuation: f64,
    pub self_interference: f64,
    pub n_bob_tx: usize,
    pub n_bob_rx: usize,
    pub spacing_ratio: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            power_alice: 70.0,
            power_bob: 70.0,
            dist_ab: 500.0,
            dist_ae: 500.0,
            dist_be: 500.0,
            angle_ab: 60.0,
            angle_ae: 120.0,
            angle_be: 45.0,
            path_loss_exp: 2.0,
            ref_attenuation: 1.0,
            self_interference: 0.5,
            n_bob_tx: 16,
            n_bob_rx: 1,
            spacing_ratio: 0.5,
        }
    }
}

impl ScenarioConfig {
    /// Physical scenario for `n_alice` antennas at the given reference SNR.
    pub fn to_scenario(&self, n_alice: usize, snr_db: f64) -> Scenario {
        Scenario {
            power_alice: dbm_to_watts(self.power_alice),
            power_bob: dbm_to_watts(self.power_bob),
            dist_ab: self.dist_ab,
            dist_ae: self.dist_ae,
            dist_be: self.dist_be,
            angle_ab: self.angle_ab.to_radians(),
            angle_ae: self.angle_ae.to_radians(),
            angle_be: self.angle_be.to_radians(),
            path_loss_exp: self.path_loss_exp,
            ref_attenuation: self.ref_attenuation,
            self_interference: self.self_interference,
            noise_power: 0.0,
            n_alice,
            n_bob_tx: self.n_bob_tx,
            n_bob_rx: self.n_bob_rx,
            spacing_ratio: self.spacing_ratio,
        }
        .with_snr_db(snr_db)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub bits: Vec<u32>,
    pub n_alice: Vec<usize>,
    pub snr_db: Vec<f64>,
    /// Probe angle step in degrees for the BER sweep.
    pub angle_step: f64,
}

/// Fully resolved and range-checked experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub figure: Figure,
    pub scenario: ScenarioConfig,
    pub grids: Grids,
    pub trial: TrialConfig,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output: Option<PathBuf>,
    scenario: Option<RawScenario>,
    sweep: Option<RawSweep>,
    grids: Option<RawGrids>,
    trial: Option<RawTrial>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    power_alice: Option<f64>,
    power_bob: Option<f64>,
    dist_ab: Option<f64>,
    dist_ae: Option<f64>,
    dist_be: Option<f64>,
    angle_ab: Option<f64>,
    angle_ae: Option<f64>,
    angle_be: Option<f64>,
    path_loss_exp: Option<f64>,
    ref_attenuation: Option<f64>,
    self_interference: Option<f64>,
    n_bob_tx: Option<i64>,
    n_bob_rx: Option<i64>,
    spacing_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    figure: Option<Figure>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    bits: Option<Vec<i64>>,
    n_alice: Option<Vec<i64>>,
    snr_db: Option<Vec<f64>>,
    angle_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrial {
    symbols_per_point: Option<i64>,
    trials: Option<i64>,
    master_seed: Option<i64>,
    qe_model: Option<QeModel>,
}

/// Parses and validates a configuration whose figure comes from
/// `sweep.figure` (default `sr_vs_l`).
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config(raw, None)
}

/// Parses and validates a configuration. `figure` is the sweep requested by
/// the caller; a conflicting `sweep.figure` is an error.
pub fn parse_config(raw: &str, figure: Option<Figure>) -> Result<ExperimentConfig, ConfigError> {
    let parsed: RawConfig = toml::from_str(raw).map_err(|e| ConfigError::Parse(e.to_string()))?;

    let configured = parsed.sweep.and_then(|s| s.figure);
    let figure = match (figure, configured) {
        (Some(a), Some(b)) if a != b => {
            return Err(ConfigError::range(
                "sweep.figure",
                format!("config selects `{b}` but `{a}` was requested"),
            ))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => Figure::SrVsL,
    };

    let scenario = resolve_scenario(parsed.scenario.unwrap_or_default())?;
    let grids = resolve_grids(figure, parsed.grids.unwrap_or_default())?;
    let trial = resolve_trial(figure, parsed.trial.unwrap_or_default())?;
    Ok(ExperimentConfig {
        figure,
        scenario,
        grids,
        trial,
        output: parsed.output,
    })
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::range(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::range(key, format!("must be positive, got {v}")))
    }
}

fn angle(key: &str, v: f64) -> Result<f64, ConfigError> {
    if (0.0..360.0).contains(&v) {
        Ok(v)
    } else {
        Err(ConfigError::range(key, format!("must lie in [0, 360), got {v}")))
    }
}

fn count(key: &str, v: i64, min: i64) -> Result<usize, ConfigError> {
    if v >= min {
        usize::try_from(v).map_err(|_| ConfigError::range(key, "too large"))
    } else {
        Err(ConfigError::range(key, format!("must be at least {min}, got {v}")))
    }
}

fn resolve_scenario(raw: RawScenario) -> Result<ScenarioConfig, ConfigError> {
    let d = ScenarioConfig::default();
    let s = ScenarioConfig {
        power_alice: finite("scenario.power_alice", raw.power_alice.unwrap_or(d.power_alice))?,
        power_bob: finite("scenario.power_bob", raw.power_bob.unwrap_or(d.power_bob))?,
        dist_ab: positive("scenario.dist_ab", raw.dist_ab.unwrap_or(d.dist_ab))?,
        dist_ae: positive("scenario.dist_ae", raw.dist_ae.unwrap_or(d.dist_ae))?,
        dist_be: positive("scenario.dist_be", raw.dist_be.unwrap_or(d.dist_be))?,
        angle_ab: angle("scenario.angle_ab", raw.angle_ab.unwrap_or(d.angle_ab))?,
        angle_ae: angle("scenario.angle_ae", raw.angle_ae.unwrap_or(d.angle_ae))?,
        angle_be: angle("scenario.angle_be", raw.angle_be.unwrap_or(d.angle_be))?,
        path_loss_exp: finite(
            "scenario.path_loss_exp",
            raw.path_loss_exp.unwrap_or(d.path_loss_exp),
        )?,
        ref_attenuation: positive(
            "scenario.ref_attenuation",
            raw.ref_attenuation.unwrap_or(d.ref_attenuation),
        )?,
        self_interference: raw.self_interference.unwrap_or(d.self_interference),
        n_bob_tx: count("scenario.n_bob_tx", raw.n_bob_tx.unwrap_or(d.n_bob_tx as i64), 1)?,
        n_bob_rx: count("scenario.n_bob_rx", raw.n_bob_rx.unwrap_or(d.n_bob_rx as i64), 1)?,
        spacing_ratio: positive(
            "scenario.spacing_ratio",
            raw.spacing_ratio.unwrap_or(d.spacing_ratio),
        )?,
    };
    if s.path_loss_exp < 0.0 {
        return Err(ConfigError::range("scenario.path_loss_exp", "must be non-negative"));
    }
    if !(0.0..=1.0).contains(&s.self_interference) {
        return Err(ConfigError::range(
            "scenario.self_interference",
            format!("must lie in [0, 1], got {}", s.self_interference),
        ));
    }
    if s.n_bob_rx != 1 {
        return Err(ConfigError::range(
            "scenario.n_bob_rx",
            "Bob receives on a single antenna; must be 1",
        ));
    }
    Ok(s)
}

fn resolve_grids(figure: Figure, raw: RawGrids) -> Result<Grids, ConfigError> {
    let d = figure.default_grids();
    let bits = match raw.bits {
        Some(v) => v
            .into_iter()
            .map(|b| {
                if (1..=MAX_BITS as i64).contains(&b) {
                    Ok(b as u32)
                } else {
                    Err(ConfigError::range(
                        "grids.bits",
                        format!("entries must lie in 1..={MAX_BITS}, got {b}"),
                    ))
                }
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => d.bits,
    };
    let n_alice = match raw.n_alice {
        Some(v) => v
            .into_iter()
            .map(|n| count("grids.n_alice", n, 1))
            .collect::<Result<Vec<_>, _>>()?,
        None => d.n_alice,
    };
    let snr_db = match raw.snr_db {
        Some(v) => v
            .into_iter()
            .map(|x| finite("grids.snr_db", x))
            .collect::<Result<Vec<_>, _>>()?,
        None => d.snr_db,
    };
    let angle_step = raw.angle_step.unwrap_or(d.angle_step);
    if !(angle_step > 0.0 && angle_step <= 180.0) {
        return Err(ConfigError::range(
            "grids.angle_step",
            format!("must lie in (0, 180], got {angle_step}"),
        ));
    }
    for (key, empty) in [
        ("grids.bits", bits.is_empty()),
        ("grids.n_alice", n_alice.is_empty()),
        ("grids.snr_db", snr_db.is_empty()),
    ] {
        if empty {
            return Err(ConfigError::range(key, "must not be empty"));
        }
    }
    if figure == Figure::BerSweep {
        if n_alice.len() != 1 {
            return Err(ConfigError::range(
                "grids.n_alice",
                "ber_sweep takes exactly one array size",
            ));
        }
        if snr_db.len() != 1 {
            return Err(ConfigError::range(
                "grids.snr_db",
                "ber_sweep takes exactly one SNR",
            ));
        }
    }
    Ok(Grids {
        bits,
        n_alice,
        snr_db,
        angle_step,
    })
}

fn resolve_trial(figure: Figure, raw: RawTrial) -> Result<TrialConfig, ConfigError> {
    let d = figure.default_trial();
    let master_seed = match raw.master_seed {
        Some(s) if s < 0 => {
            return Err(ConfigError::range("trial.master_seed", "must be non-negative"))
        }
        Some(s) => s as u64,
        None => d.master_seed,
    };
    Ok(TrialConfig {
        symbols_per_point: count(
            "trial.symbols_per_point",
            raw.symbols_per_point.unwrap_or(d.symbols_per_point as i64),
            1,
        )?,
        trials: count("trial.trials", raw.trials.unwrap_or(d.trials as i64), 1)?,
        master_seed,
        qe_model: raw.qe_model.unwrap_or(d.qe_model),
    })
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

impl ExperimentConfig {
    /// Resolved configuration rendered as TOML. Parsing this text back yields
    /// the same configuration.
    pub fn to_toml(&self) -> String {
        let s = &self.scenario;
        let g = &self.grids;
        let t = &self.trial;
        let mut out = String::new();
        if let Some(p) = &self.output {
            let _ = writeln!(out, "output = {:?}", p.display().to_string());
        }
        let _ = writeln!(out, "[sweep]\nfigure = \"{}\"", self.figure);
        let _ = writeln!(out, "[scenario]");
        for (k, v) in [
            ("power_alice", s.power_alice),
            ("power_bob", s.power_bob),
            ("dist_ab", s.dist_ab),
            ("dist_ae", s.dist_ae),
            ("dist_be", s.dist_be),
            ("angle_ab", s.angle_ab),
            ("angle_ae", s.angle_ae),
            ("angle_be", s.angle_be),
            ("path_loss_exp", s.path_loss_exp),
            ("ref_attenuation", s.ref_attenuation),
            ("self_interference", s.self_interference),
        ] {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        let _ = writeln!(out, "n_bob_tx = {}", s.n_bob_tx);
        let _ = writeln!(out, "n_bob_rx = {}", s.n_bob_rx);
        let _ = writeln!(out, "spacing_ratio = {:?}", s.spacing_ratio);
        let _ = writeln!(out, "[grids]");
        let _ = writeln!(out, "bits = {}", list(&g.bits));
        let _ = writeln!(out, "n_alice = {}", list(&g.n_alice));
        let snr: Vec<String> = g.snr_db.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "snr_db = [{}]", snr.join(", "));
        let _ = writeln!(out, "angle_step = {:?}", g.angle_step);
        let _ = writeln!(out, "[trial]");
        let _ = writeln!(out, "symbols_per_point = {}", t.symbols_per_point);
        let _ = writeln!(out, "trials = {}", t.trials);
        let _ = writeln!(out, "master_seed = {}", t.master_seed);
        let _ = writeln!(out, "qe_model = \"{}\"", t.qe_model);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_reference_scenario() {
        let c = validate_config("").unwrap();
        assert_eq!(c.figure, Figure::SrVsL);
        assert_eq!(c.scenario, ScenarioConfig::default());
        let s = c.scenario.to_scenario(16, 15.0);
        assert!((s.power_alice - 1e4).abs() < 1e-9);
        assert_eq!(s.power_alice, s.power_bob);
        assert_eq!(s.self_interference, 0.5);
        assert_eq!((s.dist_ab, s.dist_ae, s.dist_be), (500.0, 500.0, 500.0));
        assert_eq!(s.path_loss_exp, 2.0);
        assert!((s.angle_ab - 60f64.to_radians()).abs() < 1e-15);
        assert!((s.angle_ae - 120f64.to_radians()).abs() < 1e-15);
        assert!((s.angle_be - 45f64.to_radians()).abs() < 1e-15);
        assert_eq!((s.n_bob_tx, s.n_bob_rx), (16, 1));
        assert_eq!(s.spacing_ratio, 0.5);
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn rejects_out_of_range_rho() {
        let e = validate_config("[scenario]\nself_interference = 1.5\n").unwrap_err();
        assert_eq!(e.key(), Some("scenario.self_interference"));
        assert!(e.to_string().contains("scenario.self_interference"));
    }

    #[test]
    fn rejects_zero_bits() {
        let e = validate_config("[grids]\nbits = [1, 0, 3]\n").unwrap_err();
        assert_eq!(e.key(), Some("grids.bits"));
        let e = validate_config("[grids]\nbits = [31]\n").unwrap_err();
        assert_eq!(e.key(), Some("grids.bits"));
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let e = validate_config("[scenario]\ndist_ab = 10.0\nrho = 0.3\n").unwrap_err();
        let ConfigError::Parse(msg) = e else {
            panic!("expected a parse error");
        };
        assert!(msg.contains("rho"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn rejects_malformed_toml() {
        let e = validate_config("[grids\nbits = [1]\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse(ref m) if m.contains("line 1")), "{e}");
    }

    #[test]
    fn rejects_empty_grids_and_bad_trials() {
        assert_eq!(
            validate_config("[grids]\nn_alice = []\n").unwrap_err().key(),
            Some("grids.n_alice")
        );
        assert_eq!(
            validate_config("[trial]\ntrials = 0\n").unwrap_err().key(),
            Some("trial.trials")
        );
        assert_eq!(
            validate_config("[scenario]\nn_bob_rx = 2\n").unwrap_err().key(),
            Some("scenario.n_bob_rx")
        );
        assert_eq!(
            validate_config("[scenario]\nangle_ab = 400.0\n").unwrap_err().key(),
            Some("scenario.angle_ab")
        );
        assert_eq!(
            validate_config("[grids]\nangle_step = 0.0\n").unwrap_err().key(),
            Some("grids.angle_step")
        );
    }

    #[test]
    fn figure_conflict_is_an_error() {
        let raw = "[sweep]\nfigure = \"sinr_vs_l\"\n";
        assert_eq!(validate_config(raw).unwrap().figure, Figure::SinrVsL);
        assert_eq!(
            parse_config(raw, Some(Figure::SrVsL)).unwrap_err().key(),
            Some("sweep.figure")
        );
    }

    #[test]
    fn ber_sweep_needs_single_point_grids() {
        let raw = "[grids]\nsnr_db = [0.0, 10.0]\n";
        assert_eq!(
            parse_config(raw, Some(Figure::BerSweep)).unwrap_err().key(),
            Some("grids.snr_db")
        );
        let c = parse_config("", Some(Figure::BerSweep)).unwrap();
        assert_eq!(c.grids.snr_db, vec![10.0]);
        assert_eq!(c.grids.n_alice, vec![16]);
    }

    #[test]
    fn toml_rendering_round_trips() {
        for figure in Figure::ALL {
            let raw = "output = \"x.csv\"\n[trial]\nmaster_seed = 77\nqe_model = \"deterministic\"\n";
            let c = parse_config(raw, Some(figure)).unwrap();
            let again = validate_config(&c.to_toml()).unwrap();
            assert_eq!(c, again);
        }
    }
}
