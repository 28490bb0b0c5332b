//! Sweep drivers and their CSV output.
//!
//! Each run produces a main table and, except for the BER sweep, a sidecar
//! table of closed-form reference values. Both files start with `#` comment
//! lines recording the tool version, master seed, SNR definition and the full
//! resolved configuration, followed by a CSV header row.
//!
//! | sweep | columns |
//! |---|---|
//! | `ber_sweep` | `angle_deg, receiver_model, L_or_NQE, ber, stderr` |
//! | `sinr_vs_l`, `sinr_vs_na` | `L, N_a, loss_db_simulated, loss_db_closed_form, stderr` |
//! | `sr_vs_l`, `sr_vs_l_na` | `L, N_a, snr_db, sr_nqe, sr_qe, stderr` |

mod config;
mod sweeps;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{
    parse_config, validate_config, ConfigError, ExperimentConfig, Figure, Grids, ScenarioConfig,
};
pub use sweeps::run_sweep;

use crate::link_sim::SweepResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SNR_DEFINITION: &str =
    "per-antenna receive SNR at Bob, snr = g_ab * P_a / sigma^2 (sigma^2 equal at Bob and Eve)";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid scenario: {0}")]
    Simulation(#[from] crate::Error),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// Process exit code: 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Simulation(_) => 2,
            ExperimentError::Io { .. } => 3,
        }
    }
}

/// A CSV table with fixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `#` lines specific to this table.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Output of one sweep, held in memory until written.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub config: ExperimentConfig,
    pub result: SweepResult,
    pub table: Table,
    pub sidecar: Option<Table>,
}

/// Paths written by [`SweepOutput::write`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub main: PathBuf,
    pub sidecar: Option<PathBuf>,
}

/// `<dir>/<stem>.closed_form.csv` next to the main output.
pub fn sidecar_path(main: &Path) -> PathBuf {
    let stem = main
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".to_owned());
    main.with_file_name(format!("{stem}.closed_form.csv"))
}

impl SweepOutput {
    fn header(&self) -> String {
        let c = &self.config;
        let mut lines = vec![
            format!("dmqe {VERSION}"),
            format!("figure: {}", c.figure),
            format!("master_seed: {}", c.trial.master_seed),
            format!("snr_definition: {SNR_DEFINITION}"),
            format!("qe_model: {}", c.trial.qe_model),
            format!("trials_per_point: {}", c.trial.trials),
        ];
        if c.figure == Figure::BerSweep {
            lines.push(format!(
                "symbols_per_point: {} ({} per trial)",
                c.trial.symbols_per_point,
                c.trial.symbols_per_trial()
            ));
        }
        lines.push("resolved config:".to_owned());
        lines.extend(c.to_toml().lines().map(|l| format!("  {l}")));
        lines.into_iter().map(|l| format!("# {l}\n")).collect()
    }

    fn render(&self, table: &Table) -> Vec<u8> {
        let mut out = self.header().into_bytes();
        for note in &table.notes {
            out.extend_from_slice(format!("# {note}\n").as_bytes());
        }
        let mut writer = csv::Writer::from_writer(out);
        // writing into a Vec cannot fail
        writer.write_record(&table.columns).expect("in-memory csv");
        for row in &table.rows {
            writer.write_record(row).expect("in-memory csv");
        }
        writer.into_inner().expect("in-memory csv")
    }

    pub fn main_csv(&self) -> Vec<u8> {
        self.render(&self.table)
    }

    pub fn sidecar_csv(&self) -> Option<Vec<u8>> {
        self.sidecar.as_ref().map(|t| self.render(t))
    }

    pub fn write(&self, path: &Path) -> Result<WrittenFiles, ExperimentError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| ExperimentError::Io { path, source }
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io(dir))?;
        }
        fs::write(path, self.main_csv()).map_err(io(path))?;
        let sidecar = match self.sidecar_csv() {
            Some(bytes) => {
                let side = sidecar_path(path);
                fs::write(&side, bytes).map_err(io(&side))?;
                Some(side)
            }
            None => None,
        };
        Ok(WrittenFiles {
            main: path.to_path_buf(),
            sidecar,
        })
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
