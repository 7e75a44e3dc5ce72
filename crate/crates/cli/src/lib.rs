//! Command-line front end for `semiqc-core`: configuration, artifact formats and subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, SUBCOMMANDS};
pub use config::{ExperimentConfig, MapChoice, ModelSpec, PotentialChoice, ReadoutMode};
pub use error::{CliError, CliResult};

/// Exit status for command-line usage errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "semiqc",
    version,
    about = "Trace formulas and statevector pipelines for quantized torus maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Periodic orbits of length t with their invariants (orbits.csv).
    Orbits(Flags),
    /// Dense quantization in the binary matrix format (matrix.bin).
    Quantize(Flags),
    /// tr U^t for t = 1..t_max (traces.csv).
    Traces(Flags),
    /// Characteristic-polynomial coefficients from traces (beta.csv).
    Charpoly(Flags),
    /// Spectral density from traces up to a cutoff (density.csv).
    Density(Flags),
    /// Semiclassical against exact traces (trace_report.csv).
    Semiclassical(Flags),
    /// Fourier transform of traces over N (action_spectrum.csv, peaks.csv).
    ActionSpectrum(Flags),
    /// Classical and quantum periods of a cat map (periods.jsonl).
    CatPeriod(Flags),
    /// Orbit-sum pipeline on the simulator.
    SpectrumFromOrbits(Flags),
    /// Register pipeline estimating tr U^t.
    TracesFromQuantum(Flags),
    /// Integrable/chaotic classification from the t = 2 trace.
    IntegrabilityProbe(Flags),
    /// Phase estimation and period reconstruction (phases.csv).
    PhaseEstimation(Flags),
}

impl Command {
    pub fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Orbits(f) => ("orbits", f),
            Command::Quantize(f) => ("quantize", f),
            Command::Traces(f) => ("traces", f),
            Command::Charpoly(f) => ("charpoly", f),
            Command::Density(f) => ("density", f),
            Command::Semiclassical(f) => ("semiclassical", f),
            Command::ActionSpectrum(f) => ("action-spectrum", f),
            Command::CatPeriod(f) => ("cat-period", f),
            Command::SpectrumFromOrbits(f) => ("spectrum-from-orbits", f),
            Command::TracesFromQuantum(f) => ("traces-from-quantum", f),
            Command::IntegrabilityProbe(f) => ("integrability-probe", f),
            Command::PhaseEstimation(f) => ("phase-estimation", f),
        }
    }
}

/// Flags shared by every subcommand; each overrides the matching config field.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub map: Option<MapChoice>,
    /// Cat matrix [[a, b], [c, d]].
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<i64>,
    /// Kick strength.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Free-evolution time of the kicked map.
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long, value_enum)]
    pub potential: Option<PotentialChoice>,
    /// Per-step Maslov index (skips calibration).
    #[arg(long, allow_negative_numbers = true)]
    pub maslov: Option<i64>,
    /// Hilbert dimension(s), comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Sets both phase and amplitude bits.
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub phase_bits: Option<u32>,
    #[arg(long)]
    pub amplitude_bits: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_enum)]
    pub readout: Option<ReadoutMode>,
    /// Phase-estimation input: random or eigenvector:<j>.
    #[arg(long)]
    pub input: Option<String>,
    /// Unitary in the binary matrix format.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Use half the traces plus det(-U).
    #[arg(long)]
    pub half: bool,
    /// Run phase estimation in cat-period up to this N.
    #[arg(long)]
    pub pe_max: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Flags {
    /// Config file (if any) with flags applied on top.
    pub fn resolve(&self, subcommand: &str) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_json(&std::fs::read_to_string(p)?)?,
            None => ExperimentConfig::default(),
        };
        cfg.subcommand = subcommand.into();
        let m = &mut cfg.model;
        if let Some(v) = self.map {
            m.map = v;
        }
        for (slot, v) in m.matrix.iter_mut().zip([self.a, self.b, self.c, self.d]) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        set(&mut m.k, self.k);
        set(&mut m.period, self.period);
        set(&mut m.potential, self.potential);
        if self.maslov.is_some() {
            m.maslov = self.maslov;
        }
        if !self.dims.is_empty() {
            cfg.dims = self.dims.clone();
        }
        for (slot, v) in [
            (&mut cfg.n_max, self.n_max),
            (&mut cfg.t, self.t),
            (&mut cfg.t_max, self.t_max),
            (&mut cfg.pe_max, self.pe_max),
            (&mut cfg.points, self.points),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
        if self.bits.is_some() {
            cfg.phase_bits = self.bits;
            cfg.amplitude_bits = self.bits;
        }
        if self.phase_bits.is_some() {
            cfg.phase_bits = self.phase_bits;
        }
        if self.amplitude_bits.is_some() {
            cfg.amplitude_bits = self.amplitude_bits;
        }
        set(&mut cfg.seed, self.seed);
        if self.shots.is_some() {
            cfg.shots = self.shots;
        }
        set(&mut cfg.readout, self.readout);
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        if self.matrix.is_some() {
            cfg.matrix_file = self.matrix.clone();
        }
        cfg.half |= self.half;
        set(&mut cfg.output, self.out.clone());
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Caps the worker pool at `SEMICLASS_QC_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("SEMICLASS_QC_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Validation(format!(
                "SEMICLASS_QC_THREADS={v:?} is not a positive integer"
            ))
        })?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Parses arguments, runs the subcommand and prints its summary; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let (name, flags) = cli.command.parts();
    let outcome = configure_threads()
        .and_then(|_| flags.resolve(name))
        .and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            // a closed pipe on stdout is not a failure; the artifacts are already written
            let _ = writeln!(std::io::stdout(), "{text}");
            0
        }
        Err(e) => {
            eprintln!("semiqc {name}: {e}");
            e.exit_code()
        }
    }
}
