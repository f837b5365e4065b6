//! Mode recovery from spectra via the eigenvector-eigenvalue identity.
//!
//! The identity relates the squared magnitude of eigenvector component
//! (i, j) of a symmetric matrix to its eigenvalues and the eigenvalues of
//! the principal submatrix with row and column j removed:
//!
//! ```text
//! |v_ij|^2 * prod_{k != i} (lam_i - lam_k)  =  prod_k (lam_i - mu_k(j))
//! ```
//!
//! Products are accumulated in sign-and-log-magnitude form so that spectra
//! with very small physical eigenvalues (seconds^2 at radiofrequency scale)
//! neither underflow nor overflow. For the non-Hermitian case `H = CM` the
//! magnitudes obtained from the symmetric equivalent are mapped through
//! `U = C^(1/2) T` and renormalized.

use crate::error::{Error, Result};
use crate::matrix::{diag_power, RealMatrix};
use crate::model::SystemMatrices;

/// An ordered list of eigenvalues. Seconds^2 in physical use; unit-free in
/// pure matrix use (the identity is scale covariant).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps an already nondecreasing list of finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for pair in values.windows(2) {
            if pair[1] < pair[0] {
                return Err(Error::InvalidSpectrum(format!(
                    "values must be nondecreasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite value {bad}")));
        }
        Ok(Self { values })
    }

    /// Sorts, then wraps.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite value".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The n single-deletion subspectra of an n-element system; entry j holds
/// the n-1 eigenvalues of the system with element j removed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspectraSet {
    by_deletion: Vec<Spectrum>,
}

impl SubspectraSet {
    pub fn new(by_deletion: Vec<Spectrum>) -> Result<Self> {
        let n = by_deletion.len();
        for (j, sub) in by_deletion.iter().enumerate() {
            if sub.len() != n - 1 {
                return Err(Error::InvalidSpectrum(format!(
                    "subspectrum {} has {} values, expected {}",
                    j,
                    sub.len(),
                    n - 1
                )));
            }
        }
        Ok(Self { by_deletion })
    }

    pub fn n(&self) -> usize {
        self.by_deletion.len()
    }

    pub fn by_deletion(&self) -> &[Spectrum] {
        &self.by_deletion
    }

    pub fn get(&self, j: usize) -> &Spectrum {
        &self.by_deletion[j]
    }
}

/// N x N nonnegative mode-component magnitudes; row i is mode i, column j
/// the component on element j.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    n: usize,
    magnitudes: Vec<f64>,
}

impl ModeMatrix {
    pub fn new(n: usize, magnitudes: Vec<f64>) -> Result<Self> {
        if magnitudes.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: magnitudes.len(),
            });
        }
        for (idx, &v) in magnitudes.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "mode magnitude at ({}, {}) must be finite and nonnegative, got {}",
                    idx / n.max(1),
                    idx % n.max(1),
                    v
                )));
            }
        }
        Ok(Self { n, magnitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, mode: usize, component: usize) -> f64 {
        self.magnitudes[mode * self.n + component]
    }

    pub fn row(&self, mode: usize) -> &[f64] {
        &self.magnitudes[mode * self.n..(mode + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.magnitudes.chunks(self.n.max(1)).take(self.n)
    }

    /// Scales each row to unit Euclidean norm; all-zero rows are left as is.
    pub fn normalize_rows(&mut self) {
        let n = self.n;
        for i in 0..n {
            let norm = self.magnitudes[i * n..(i + 1) * n]
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            if norm > 0.0 {
                for v in &mut self.magnitudes[i * n..(i + 1) * n] {
                    *v /= norm;
                }
            }
        }
    }
}

/// Evaluates the identity for every (mode, component) pair.
///
/// Ratios whose squared magnitude falls below `zero_threshold` relative to
/// the largest ratio in the same mode row are set to exactly zero; ratios
/// more negative than that bound signal inconsistent (unrepaired) input and
/// are an error. Rows are not normalized here; normalization is a pipeline
/// step.
pub fn thompson_modes(
    full: &Spectrum,
    subs: &SubspectraSet,
    zero_threshold: f64,
    degeneracy_tol: f64,
) -> Result<ModeMatrix> {
    thompson_modes_detailed(full, subs, zero_threshold, degeneracy_tol).map(|(m, _)| m)
}

/// As [`thompson_modes`], additionally returning the (mode, component)
/// pairs that were thresholded to zero.
pub fn thompson_modes_detailed(
    full: &Spectrum,
    subs: &SubspectraSet,
    zero_threshold: f64,
    degeneracy_tol: f64,
) -> Result<(ModeMatrix, Vec<(usize, usize)>)> {
    let n = full.len();
    if subs.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: subs.n(),
        });
    }
    let lambda = full.values();

    if n >= 2 {
        let range = lambda[n - 1] - lambda[0];
        let min_gap = lambda
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let threshold = degeneracy_tol * range;
        if min_gap <= threshold {
            return Err(Error::DegenerateSpectrum { min_gap, threshold });
        }
    }

    // Squared magnitudes first, one row per mode.
    let mut ratios = vec![0.0f64; n * n];
    for i in 0..n {
        let mut den_sign = 1.0f64;
        let mut den_log = 0.0f64;
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = lambda[i] - lambda[k];
            den_sign *= d.signum();
            den_log += d.abs().ln();
        }
        for j in 0..n {
            let mut num_sign = 1.0f64;
            let mut num_log = 0.0f64;
            let mut exact_zero = false;
            for &mu in subs.get(j).values() {
                let d = lambda[i] - mu;
                if d == 0.0 {
                    exact_zero = true;
                    break;
                }
                num_sign *= d.signum();
                num_log += d.abs().ln();
            }
            ratios[i * n + j] = if exact_zero {
                0.0
            } else {
                num_sign * den_sign * (num_log - den_log).exp()
            };
        }
    }

    let mut magnitudes = vec![0.0f64; n * n];
    let mut zeroed = Vec::new();
    for i in 0..n {
        let row = &ratios[i * n..(i + 1) * n];
        let row_scale = row.iter().fold(0.0f64, |acc, &r| acc.max(r));
        let bound = zero_threshold * row_scale;
        for j in 0..n {
            let r = row[j];
            if r.abs() <= bound {
                if r != 0.0 {
                    zeroed.push((i, j));
                }
                magnitudes[i * n + j] = 0.0;
            } else if r < 0.0 {
                return Err(Error::NegativeSquaredComponent {
                    mode: i,
                    component: j,
                    value: r,
                });
            } else {
                magnitudes[i * n + j] = r.sqrt();
            }
        }
    }

    Ok((ModeMatrix::new(n, magnitudes)?, zeroed))
}

/// The symmetric matrix `C^(1/2) M C^(1/2)`, isospectral with `H = CM`.
/// Built entrywise from the upper triangle, so the result is exactly
/// symmetric.
pub fn hermitian_equivalent(sys: &SystemMatrices) -> Result<RealMatrix> {
    let sqrt_c = diag_power(&sys.c, 0.5)?;
    let n = sys.m.dim();
    if sys.c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sys.c.dim(),
        });
    }
    let mut out = RealMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let value = sqrt_c.get(i, i) * sys.m.get(i, j) * sqrt_c.get(j, j);
            out.set(i, j, value);
            out.set(j, i, value);
        }
    }
    Ok(out)
}

/// Maps Hermitian-equivalent mode magnitudes to those of `H = CM` via
/// `U = C^(1/2) T`, then renormalizes each mode row. Any positive scaling
/// of `c` cancels, so capacitance ratios are sufficient.
pub fn correct_nonhermitian(t_modes: &ModeMatrix, c: &RealMatrix) -> Result<ModeMatrix> {
    let sqrt_c = diag_power(c, 0.5)?;
    let n = t_modes.n();
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.dim(),
        });
    }
    let mut magnitudes = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            magnitudes.push(sqrt_c.get(j, j) * t_modes.get(i, j));
        }
    }
    let mut out = ModeMatrix::new(n, magnitudes)?;
    out.normalize_rows();
    Ok(out)
}

/// A gap between two clusters of a sorted value list, detected when some
/// consecutive gap (with at least two values on each side) exceeds the
/// internal spread of both resulting clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGap {
    /// Width of the separating gap, in the units of the input.
    pub gap: f64,
    /// Last index (zero-based) of the lower cluster.
    pub split_index: usize,
    pub lower_spread: f64,
    pub upper_spread: f64,
}

/// Looks for a band gap in an ascending value list. Returns the widest
/// qualifying split, or `None` when no gap dominates both cluster spreads.
pub fn detect_band_gap(sorted: &[f64]) -> Option<BandGap> {
    let n = sorted.len();
    if n < 4 {
        return None;
    }
    let mut best: Option<BandGap> = None;
    for split in 1..n - 2 {
        let gap = sorted[split + 1] - sorted[split];
        let lower_spread = sorted[split] - sorted[0];
        let upper_spread = sorted[n - 1] - sorted[split + 1];
        if gap > lower_spread && gap > upper_spread {
            let candidate = BandGap {
                gap,
                split_index: split,
                lower_spread,
                upper_spread,
            };
            if best.as_ref().is_none_or(|b| candidate.gap > b.gap) {
                best = Some(candidate);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(values: &[f64]) -> Spectrum {
        Spectrum::new(values.to_vec()).unwrap()
    }

    #[test]
    fn single_element_mode_is_one() {
        let full = spectrum(&[4.2e-19]);
        let subs = SubspectraSet::new(vec![spectrum(&[])]).unwrap();
        let modes = thompson_modes(&full, &subs, 1e-10, 1e-9).unwrap();
        assert_eq!(modes.get(0, 0), 1.0);
    }

    #[test]
    fn exchange_matrix_components() {
        // Spectra of [[0,1],[1,0]]: eigenvalues -1, 1; both deletions leave [0].
        let full = spectrum(&[-1.0, 1.0]);
        let subs =
            SubspectraSet::new(vec![spectrum(&[0.0]), spectrum(&[0.0])]).unwrap();
        let modes = thompson_modes(&full, &subs, 1e-10, 1e-9).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let sq = modes.get(i, j) * modes.get(i, j);
                assert!((sq - 0.5).abs() < 1e-14, "({i},{j}) -> {sq}");
            }
        }
    }

    #[test]
    fn zero_numerator_factor_gives_zero_component() {
        // mu equal to lambda_i short-circuits the component to exactly zero.
        let full = spectrum(&[1.0, 2.0, 3.0]);
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.0, 2.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        let modes = thompson_modes(&full, &subs, 1e-10, 1e-9).unwrap();
        assert_eq!(modes.get(0, 0), 0.0);
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let full = spectrum(&[1.0, 1.0, 2.0]);
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.0, 1.5]),
            spectrum(&[1.0, 1.5]),
            spectrum(&[1.0, 1.5]),
        ])
        .unwrap();
        match thompson_modes(&full, &subs, 1e-10, 1e-9) {
            Err(Error::DegenerateSpectrum { .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn inconsistent_input_raises_negative_component() {
        // Subspectrum value far outside the interlacing interval flips a sign.
        let full = spectrum(&[1.0, 2.0, 3.0]);
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.5, 3.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        match thompson_modes(&full, &subs, 1e-10, 1e-9) {
            Err(Error::NegativeSquaredComponent { component: 0, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn thresholded_components_are_reported() {
        // A barely-positive ratio below the relative threshold goes to zero.
        let full = spectrum(&[1.0, 2.0, 3.0]);
        let eps = 1e-14;
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.0 + eps, 2.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        let (modes, zeroed) = thompson_modes_detailed(&full, &subs, 1e-10, 1e-9).unwrap();
        assert!(zeroed.contains(&(0, 0)));
        assert_eq!(modes.get(0, 0), 0.0);
    }

    #[test]
    fn hermitian_equivalent_examples() {
        let sys = SystemMatrices {
            c: RealMatrix::identity(2),
            m: RealMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap(),
            h: RealMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        };
        let heq = hermitian_equivalent(&sys).unwrap();
        assert_eq!(heq, sys.m);

        let c = RealMatrix::from_diagonal(&[4.0, 1.0]);
        let m = RealMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let h = c.matmul(&m).unwrap();
        let heq = hermitian_equivalent(&SystemMatrices { c, m, h }).unwrap();
        let expected = RealMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 1.0]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((heq.get(i, j) - expected.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_capacitance_leaves_modes_unchanged() {
        let t = ModeMatrix::new(2, vec![0.6, 0.8, 0.8, 0.6]).unwrap();
        let out = correct_nonhermitian(&t, &RealMatrix::identity(2)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((out.get(i, j) - t.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn basis_rows_are_scale_invariant() {
        let t = ModeMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let c = RealMatrix::from_diagonal(&[4.0, 1.0]);
        let out = correct_nonhermitian(&t, &c).unwrap();
        assert_eq!(out.get(0, 0), 1.0);
        assert_eq!(out.get(0, 1), 0.0);
        assert_eq!(out.get(1, 0), 0.0);
        assert_eq!(out.get(1, 1), 1.0);
    }

    #[test]
    fn subspectra_shape_enforced() {
        let bad = SubspectraSet::new(vec![spectrum(&[1.0]), spectrum(&[1.0, 2.0])]);
        assert!(matches!(bad, Err(Error::InvalidSpectrum(_))));
    }

    #[test]
    fn spectrum_ordering_enforced() {
        assert!(matches!(
            Spectrum::new(vec![2.0, 1.0]),
            Err(Error::InvalidSpectrum(_))
        ));
        let sorted = Spectrum::from_unsorted(vec![2.0, 1.0]).unwrap();
        assert_eq!(sorted.values(), &[1.0, 2.0]);
    }

    #[test]
    fn band_gap_needs_two_per_cluster() {
        // Largest gap before a singleton must not count as a band gap.
        assert!(detect_band_gap(&[1.0, 2.0, 3.0, 10.0]).is_none());
        let gap = detect_band_gap(&[1.0, 1.2, 5.0, 5.3]).unwrap();
        assert_eq!(gap.split_index, 1);
        assert!((gap.gap - 3.8).abs() < 1e-12);
        assert!(detect_band_gap(&[1.0, 2.0, 3.0]).is_none());
    }
}
