//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:e} exceeds {allowed:e}")]
    NotSymmetric { max_asymmetry: f64, allowed: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    DidNotConverge(usize),

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("matrix is not diagonal: nonzero entry at ({row}, {col})")]
    NotDiagonal { row: usize, col: usize },

    #[error("diagonal entry {index} must be strictly positive, got {value:e}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{name} must be strictly positive, got {value:e}")]
    NonPositiveInput { name: &'static str, value: f64 },

    #[error("cannot delete a resonator from a single-element array")]
    TooSmall,

    #[error("eigenvalue {index} is not positive ({value:e}); configuration is unphysical")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("degenerate spectrum: min eigenvalue gap {min_gap:e} is within {threshold:e}")]
    DegenerateSpectrum { min_gap: f64, threshold: f64 },

    #[error("negative squared component {value:e} at mode {mode}, component {component} (inconsistent spectra)")]
    NegativeSquaredComponent {
        mode: usize,
        component: usize,
        value: f64,
    },

    #[error("capacitance ratios are required for the non-Hermitian branch")]
    MissingCapacitanceRatios,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error on key '{key}': {message}")]
    Schema { key: String, message: String },

    #[error("trace must contain at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("expected {expected} peaks, found {found}")]
    PeakCountMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
