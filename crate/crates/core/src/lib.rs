//! Recovery of oscillation-mode magnitudes of coupled resonator arrays from
//! resonance spectra alone.
//!
//! For a one-dimensional array of inductively coupled LC resonators, the
//! magnitudes of the oscillation-mode components can be reconstructed from
//! the resonance spectrum of the intact array together with the spectra of
//! the `N` arrays obtained by removing one element at a time. The
//! eigenvector-eigenvalue identity does the reconstruction; removing the
//! j-th resonator realizes the principal submatrix with row and column j
//! deleted.
//!
//! The crate provides:
//!
//! - [`matrix`]: dense square matrices and a cyclic-Jacobi symmetric
//!   eigensolver,
//! - [`model`]: the circuit model (capacitance matrix `C`, magnetic matrix
//!   `M`, system matrix `H = CM`, `lambda = omega^-2`) and physical
//!   single-element deletion,
//! - [`eei`]: the identity itself in overflow-safe log-magnitude form plus
//!   the `U = C^(1/2) T` correction for arrays with unequal capacitances,
//! - [`pipeline`]: the measurement-reconciliation pipeline (sorting,
//!   mirror-symmetrization, Cauchy-interlacing repair, normalization) and an
//!   in-silico measurement simulator,
//! - [`peaks`]: prominence-based resonance peak extraction from reflection
//!   traces,
//! - [`io`] and [`figure`]: strict file schemas and deterministic SVG
//!   rendering.

pub mod eei;
pub mod error;
pub mod figure;
pub mod io;
pub mod matrix;
pub mod model;
pub mod peaks;
pub mod pipeline;

pub use eei::{
    correct_nonhermitian, detect_band_gap, hermitian_equivalent, thompson_modes, BandGap,
    ModeMatrix, Spectrum, SubspectraSet,
};
pub use error::{Error, Result};
pub use figure::{figure_svg, render_figure};
pub use matrix::{diag_power, principal_submatrix, sym_eigen, RealMatrix, SymEigenResult};
pub use model::{
    build_matrices, capacitance_from_base_freq, delete_resonator, freq_to_lambda, lambda_to_freq,
    system_spectrum, ArrayConfig, SystemMatrices,
};
pub use peaks::{detect_peaks, PeakOptions, Polarity, Trace};
pub use pipeline::{
    interlacing_repair, run_recovery, simulate_measurement, sort_and_convert,
    symmetrize_subspectra, MeasurementSet, RecoveryOptions, RecoveryReport,
};
