//! `resmodes`: simulate, recover, and inspect oscillation modes of coupled
//! resonator arrays from resonance spectra.
//!
//! Exit codes: 0 success, 1 comparison above tolerance, 2 input/schema
//! error, 3 model error, 4 degenerate spectrum, 5 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use resonator_modes::Error;

mod commands;

#[derive(Parser)]
#[command(
    name = "resmodes",
    version,
    about = "Recover resonator-array oscillation modes from resonance spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SymmetrizeMode {
    /// Symmetrize when the configured base frequencies are palindromic;
    /// off when no configuration is given.
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolarityArg {
    Dips,
    Peaks,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a measurement of a configured array and write it as JSON.
    Simulate {
        /// Array configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Relative frequency noise level (multiplicative Gaussian sigma).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Noise generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output measurement file (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover mode magnitudes from a measurement file.
    Recover {
        /// Measurement file (JSON).
        #[arg(long)]
        measurement: PathBuf,
        /// Optional array configuration; enables symmetrization auto-detection
        /// and supplies capacitance ratios for the non-Hermitian branch.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Subspectrum symmetrization.
        #[arg(long, value_enum, default_value_t = SymmetrizeMode::Auto)]
        symmetrize: SymmetrizeMode,
        /// Force the non-Hermitian branch (requires capacitance ratios from --config).
        #[arg(long)]
        non_hermitian: bool,
        /// Relative squared-magnitude threshold below which components are zeroed.
        #[arg(long, default_value_t = resonator_modes::pipeline::DEFAULT_ZERO_THRESHOLD)]
        zero_threshold: f64,
        /// Minimum eigenvalue gap relative to the spectral range.
        #[arg(long, default_value_t = resonator_modes::pipeline::DEFAULT_DEGENERACY_TOL)]
        degeneracy_tol: f64,
        /// Output report file (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract resonance peak frequencies from a trace CSV.
    Peaks {
        /// Trace file: CSV with header `frequency_hz,magnitude`.
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = PolarityArg::Dips)]
        polarity: PolarityArg,
        /// Minimum prominence relative to the trace magnitude range.
        #[arg(long, default_value_t = 0.1)]
        min_prominence: f64,
        /// Minimum separation between reported peaks, Hz.
        #[arg(long, default_value_t = 0.0)]
        min_separation_hz: f64,
        /// Fail unless exactly this many peaks are found.
        #[arg(long)]
        expected_count: Option<usize>,
    },
    /// Compare a recovery report against the model modes of a configuration.
    Compare {
        /// Recovery report (JSON).
        report: PathBuf,
        /// Array configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Maximum allowed per-mode magnitude error.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Render a recovery report as a static SVG figure.
    Plot {
        /// Recovery report (JSON).
        report: PathBuf,
        /// Optional configuration for a model-mode overlay.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both bundled demo scenarios end to end: simulate, recover,
    /// compare, plot.
    Demo {
        /// Output directory for measurements, reports, and figures.
        #[arg(long, default_value = "demo-out")]
        out: PathBuf,
        /// Relative frequency noise level.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comparison tolerance for the zero-noise pass/fail verdict.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::Schema { .. }
        | Error::InvalidConfig(_)
        | Error::InvalidMeasurement(_)
        | Error::InvalidOptions(_)
        | Error::InvalidSpectrum(_)
        | Error::NonPositiveInput { .. }
        | Error::MissingCapacitanceRatios
        | Error::TooFewPoints { .. }
        | Error::PeakCountMismatch { .. }
        | Error::DimensionMismatch { .. }
        | Error::IndexOutOfRange { .. } => 2,
        Error::NotSymmetric { .. }
        | Error::DidNotConverge(_)
        | Error::NotDiagonal { .. }
        | Error::NonPositiveDiagonal { .. }
        | Error::NonFiniteEntry { .. }
        | Error::NonPositiveEigenvalue { .. }
        | Error::NegativeSquaredComponent { .. }
        | Error::TooSmall => 3,
        Error::DegenerateSpectrum { .. } => 4,
        Error::Io(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            config,
            noise,
            seed,
            out,
        } => commands::simulate(&config, noise, seed, &out),
        Command::Recover {
            measurement,
            config,
            symmetrize,
            non_hermitian,
            zero_threshold,
            degeneracy_tol,
            out,
        } => commands::recover(
            &measurement,
            config.as_deref(),
            symmetrize,
            non_hermitian,
            zero_threshold,
            degeneracy_tol,
            &out,
        ),
        Command::Peaks {
            trace,
            polarity,
            min_prominence,
            min_separation_hz,
            expected_count,
        } => commands::peaks(
            &trace,
            polarity,
            min_prominence,
            min_separation_hz,
            expected_count,
        ),
        Command::Compare {
            report,
            config,
            tol,
        } => commands::compare(&report, &config, tol),
        Command::Plot {
            report,
            config,
            out,
        } => commands::plot(&report, config.as_deref(), &out),
        Command::Demo {
            out,
            noise,
            seed,
            tol,
        } => commands::demo(&out, noise, seed, tol),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
