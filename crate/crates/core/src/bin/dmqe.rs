use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmqe::experiments::{parse_config, run_sweep, ExperimentError, Figure};

#[derive(Parser, Debug)]
#[command(author, version, about = "Directional-modulation link sweeps with quantized phase shifters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BER versus probe angle, ideal and quantized phases
    BerSweep(RunArgs),
    /// SINR loss versus quantizer bits
    SinrVsL(RunArgs),
    /// SINR loss versus Alice array size
    SinrVsNa(RunArgs),
    /// Secrecy rate versus quantizer bits at several SNRs
    SrVsL(RunArgs),
    /// Secrecy rate versus quantizer bits for several array sizes
    SrVsLNa(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML config; built-in defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed, overrides trial.master_seed
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path, overrides the config's output
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn run(figure: Figure, args: RunArgs) -> Result<(), ExperimentError> {
    let raw = match &args.config {
        Some(path) => fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut config = parse_config(&raw, Some(figure))?;
    if let Some(seed) = args.seed {
        config.trial.master_seed = seed;
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", figure.name())));
    config.output = Some(out.clone());

    let workers = match args.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    };
    let output = run_sweep(&config, workers)?;
    let written = output.write(&out)?;
    eprintln!("wrote {}", written.main.display());
    if let Some(side) = written.sidecar {
        eprintln!("wrote {}", side.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (figure, args) = match cli.command {
        Command::BerSweep(a) => (Figure::BerSweep, a),
        Command::SinrVsL(a) => (Figure::SinrVsL, a),
        Command::SinrVsNa(a) => (Figure::SinrVsNa, a),
        Command::SrVsL(a) => (Figure::SrVsL, a),
        Command::SrVsLNa(a) => (Figure::SrVsLNa, a),
    };
    match run(figure, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
