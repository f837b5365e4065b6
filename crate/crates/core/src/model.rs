//! Physical model of a 1-D inductively coupled LC resonator array.
//!
//! Each element is an identical loop (inductance `L`) tuned by its own
//! capacitor. Couplings depend only on the distance between elements, so the
//! magnetic matrix `M` is a symmetric Toeplitz matrix with diagonal `L` and
//! off-diagonals `L * kappa_d` at neighbor distance `d`. The capacitance
//! matrix `C` is diagonal, and the system matrix is `H = C * M` with
//! eigenvalues `lambda = omega^-2`.

use std::f64::consts::PI;

use crate::eei::{hermitian_equivalent, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::{sym_eigen, RealMatrix};

/// Physical description of a 1-D resonator array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    n: usize,
    inductance_h: f64,
    base_frequencies_hz: Vec<f64>,
    coupling_coefficients: Vec<f64>,
}

impl ArrayConfig {
    /// Validates and builds a configuration. Couplings are indexed by
    /// neighbor distance `d = 1..n-1` and must satisfy `|kappa_d| < 1`.
    pub fn new(
        inductance_h: f64,
        base_frequencies_hz: Vec<f64>,
        coupling_coefficients: Vec<f64>,
    ) -> Result<Self> {
        let n = base_frequencies_hz.len();
        if n == 0 {
            return Err(Error::InvalidConfig(
                "array must contain at least one element".into(),
            ));
        }
        if !(inductance_h > 0.0 && inductance_h.is_finite()) {
            return Err(Error::NonPositiveInput {
                name: "inductance_h",
                value: inductance_h,
            });
        }
        for &f in &base_frequencies_hz {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::NonPositiveInput {
                    name: "base_frequencies_hz",
                    value: f,
                });
            }
        }
        if coupling_coefficients.len() != n - 1 {
            return Err(Error::InvalidConfig(format!(
                "expected {} coupling coefficients for {} elements, got {}",
                n - 1,
                n,
                coupling_coefficients.len()
            )));
        }
        for (d, &k) in coupling_coefficients.iter().enumerate() {
            if !(k.is_finite() && k.abs() < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "coupling coefficient at distance {} must satisfy |kappa| < 1, got {}",
                    d + 1,
                    k
                )));
            }
        }
        Ok(Self {
            n,
            inductance_h,
            base_frequencies_hz,
            coupling_coefficients,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inductance_h(&self) -> f64 {
        self.inductance_h
    }

    pub fn base_frequencies_hz(&self) -> &[f64] {
        &self.base_frequencies_hz
    }

    pub fn coupling_coefficients(&self) -> &[f64] {
        &self.coupling_coefficients
    }

    /// True when the base-frequency profile reads the same in both
    /// directions (couplings are distance-indexed, hence always mirror
    /// symmetric). Controls whether subspectrum symmetrization is sound.
    pub fn is_palindromic(&self) -> bool {
        let f = &self.base_frequencies_hz;
        (0..self.n / 2).all(|j| f[j] == f[self.n - 1 - j])
    }

    /// Per-element capacitances implied by the base frequencies (farads).
    pub fn capacitances(&self) -> Vec<f64> {
        self.base_frequencies_hz
            .iter()
            .map(|&f| capacitance_from_base_freq(f, self.inductance_h).expect("validated config"))
            .collect()
    }
}

/// The realized matrices of a configuration: diagonal capacitance matrix
/// `c` (farads), magnetic matrix `m` (henries), and system matrix
/// `h = c * m` (seconds^2).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub c: RealMatrix,
    pub m: RealMatrix,
    pub h: RealMatrix,
}

impl SystemMatrices {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

/// Capacitance of an isolated LC element with base frequency `f_hz` and
/// inductance `l_h`: `C = 1 / (L * (2 pi f)^2)`.
pub fn capacitance_from_base_freq(f_hz: f64, l_h: f64) -> Result<f64> {
    if !(f_hz > 0.0 && f_hz.is_finite()) {
        return Err(Error::NonPositiveInput {
            name: "f_hz",
            value: f_hz,
        });
    }
    if !(l_h > 0.0 && l_h.is_finite()) {
        return Err(Error::NonPositiveInput {
            name: "l_h",
            value: l_h,
        });
    }
    let omega = 2.0 * PI * f_hz;
    Ok(1.0 / (l_h * omega * omega))
}

/// Maps a resonance frequency to the model eigenvalue `lambda = omega^-2`.
pub fn freq_to_lambda(f_hz: f64) -> Result<f64> {
    if !(f_hz > 0.0 && f_hz.is_finite()) {
        return Err(Error::NonPositiveInput {
            name: "f_hz",
            value: f_hz,
        });
    }
    let omega = 2.0 * PI * f_hz;
    Ok(1.0 / (omega * omega))
}

/// Inverse of [`freq_to_lambda`].
pub fn lambda_to_freq(lambda_s2: f64) -> Result<f64> {
    if !(lambda_s2 > 0.0 && lambda_s2.is_finite()) {
        return Err(Error::NonPositiveInput {
            name: "lambda_s2",
            value: lambda_s2,
        });
    }
    Ok(1.0 / (2.0 * PI * lambda_s2.sqrt()))
}

/// Builds C, M, and H = CM from the elements at the given physical
/// positions. Couplings are looked up by position distance, so a subset of
/// positions yields the physically reduced array with unchanged couplings
/// between the survivors.
fn build_from_positions(cfg: &ArrayConfig, positions: &[usize]) -> SystemMatrices {
    let n = positions.len();
    let l = cfg.inductance_h;
    let caps: Vec<f64> = positions
        .iter()
        .map(|&p| {
            capacitance_from_base_freq(cfg.base_frequencies_hz[p], l).expect("validated config")
        })
        .collect();
    let c = RealMatrix::from_diagonal(&caps);

    let mut m = RealMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                m.set(a, b, l);
            } else {
                let distance = positions[a].abs_diff(positions[b]);
                m.set(a, b, l * cfg.coupling_coefficients[distance - 1]);
            }
        }
    }

    let mut h = RealMatrix::zeros(n);
    for (a, &cap) in caps.iter().enumerate() {
        for b in 0..n {
            h.set(a, b, cap * m.get(a, b));
        }
    }

    SystemMatrices { c, m, h }
}

/// Realizes the full array as matrices.
pub fn build_matrices(cfg: &ArrayConfig) -> SystemMatrices {
    let positions: Vec<usize> = (0..cfg.n).collect();
    build_from_positions(cfg, &positions)
}

/// Physically removes resonator `j` (zero-based): the survivors keep their
/// positions, so former second neighbors of the removed element stay second
/// neighbors. Equals the principal submatrix of each full matrix exactly.
pub fn delete_resonator(cfg: &ArrayConfig, j: usize) -> Result<SystemMatrices> {
    if cfg.n == 1 {
        return Err(Error::TooSmall);
    }
    if j >= cfg.n {
        return Err(Error::IndexOutOfRange { index: j, n: cfg.n });
    }
    let positions: Vec<usize> = (0..cfg.n).filter(|&p| p != j).collect();
    Ok(build_from_positions(cfg, &positions))
}

/// Ascending eigenvalues of `h`, computed through the isospectral symmetric
/// matrix `C^(1/2) M C^(1/2)`. All values must be positive for a physical
/// configuration.
pub fn system_spectrum(sys: &SystemMatrices) -> Result<Spectrum> {
    let heq = hermitian_equivalent(sys)?;
    let eig = sym_eigen(&heq, 1e-12)?;
    for (index, &value) in eig.values.iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::NonPositiveEigenvalue { index, value });
        }
    }
    Spectrum::new(eig.values)
}
