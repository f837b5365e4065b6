//! Dense real square matrices and a symmetric eigensolver.
//!
//! Everything downstream works on small dense systems (N up to a few tens),
//! so the solver is a plain cyclic Jacobi iteration: no dependencies, fully
//! deterministic, and accurate to near machine precision for these sizes.

use crate::error::{Error, Result};

/// Dense real square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    /// Builds an `n` x `n` matrix from row-major entries. All entries must be
    /// finite and the entry count must equal `n * n`.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        for (idx, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: idx / n.max(1),
                    col: idx % n.max(1),
                });
            }
        }
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Convenience constructor from nested rows; rows must be square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.n && col < self.n);
        self.entries[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries[row * self.n + col] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn transposed(&self) -> RealMatrix {
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// True if every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j) != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues and the
/// matching eigenvectors as columns of an orthogonal matrix.
#[derive(Debug, Clone)]
pub struct SymEigenResult {
    /// Eigenvalues in nondecreasing order.
    pub values: Vec<f64>,
    /// Column k is the unit eigenvector for `values[k]`.
    pub vectors: RealMatrix,
}

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_RATIO: f64 = 1e-14;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be symmetric up to `symmetry_tol * max_abs(a)`; after the
/// check it is explicitly symmetrized, so the result depends only on the
/// symmetric part. Sweeps stop once the off-diagonal Frobenius norm drops to
/// 1e-14 of the diagonal norm. Each eigenvector column is sign-fixed so its
/// largest-magnitude entry (lowest index on ties) is positive.
pub fn sym_eigen(a: &RealMatrix, symmetry_tol: f64) -> Result<SymEigenResult> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymEigenResult {
            values: Vec::new(),
            vectors: RealMatrix::zeros(0),
        });
    }

    let scale = a.max_abs();
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((a.get(i, j) - a.get(j, i)).abs());
        }
    }
    let allowed = symmetry_tol * scale;
    if max_asym > allowed {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asym,
            allowed,
        });
    }

    // Symmetrized working copy; guarantees identical results for inputs that
    // differ only within the symmetry tolerance window.
    let mut w = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let mean = 0.5 * (a.get(i, j) + a.get(j, i));
            w.set(i, j, mean);
            w.set(j, i, mean);
        }
    }

    let mut v = RealMatrix::identity(n);
    let mut sweeps = 0;
    while !jacobi_converged(&w) {
        if sweeps == MAX_SWEEPS {
            return Err(Error::DidNotConverge(MAX_SWEEPS));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (w.get(q, q) - w.get(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    // Asymptotic form; theta^2 would overflow.
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = w.get(p, p);
                let aqq = w.get(q, q);
                w.set(p, p, app - t * apq);
                w.set(q, q, aqq + t * apq);
                w.set(p, q, 0.0);
                w.set(q, p, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = w.get(k, p);
                    let akq = w.get(k, q);
                    let new_kp = akp - s * (akq + tau * akp);
                    let new_kq = akq + s * (akp - tau * akq);
                    w.set(k, p, new_kp);
                    w.set(p, k, new_kp);
                    w.set(k, q, new_kq);
                    w.set(q, k, new_kq);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp - s * (vkq + tau * vkp));
                    v.set(k, q, vkq + s * (vkp - tau * vkq));
                }
            }
        }
        sweeps += 1;
    }

    // Ascending eigenvalue order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).partial_cmp(&w.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| w.get(i, i)).collect();
    let mut vectors = RealMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }

    // Deterministic sign: largest-magnitude entry positive, lowest index wins ties.
    for col in 0..n {
        let mut lead = 0;
        let mut lead_abs = vectors.get(0, col).abs();
        for row in 1..n {
            let mag = vectors.get(row, col).abs();
            if mag > lead_abs {
                lead_abs = mag;
                lead = row;
            }
        }
        if vectors.get(lead, col) < 0.0 {
            for row in 0..n {
                let flipped = -vectors.get(row, col);
                vectors.set(row, col, flipped);
            }
        }
    }

    Ok(SymEigenResult { values, vectors })
}

fn jacobi_converged(w: &RealMatrix) -> bool {
    let n = w.dim();
    let mut off_sq = 0.0;
    let mut diag_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = w.get(i, j);
            if i == j {
                diag_sq += v * v;
            } else {
                off_sq += v * v;
            }
        }
    }
    off_sq.sqrt() <= OFF_DIAGONAL_RATIO * diag_sq.sqrt()
}

/// Removes row and column `j` (zero-based). A 1x1 input yields the legal
/// 0x0 matrix.
pub fn principal_submatrix(a: &RealMatrix, j: usize) -> Result<RealMatrix> {
    let n = a.dim();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let mut out = RealMatrix::zeros(n - 1);
    let mut r_out = 0;
    for r in 0..n {
        if r == j {
            continue;
        }
        let mut c_out = 0;
        for c in 0..n {
            if c == j {
                continue;
            }
            out.set(r_out, c_out, a.get(r, c));
            c_out += 1;
        }
        r_out += 1;
    }
    Ok(out)
}

/// Elementwise power of a strictly positive diagonal matrix.
pub fn diag_power(c: &RealMatrix, p: f64) -> Result<RealMatrix> {
    let n = c.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j && c.get(i, j) != 0.0 {
                return Err(Error::NotDiagonal { row: i, col: j });
            }
        }
    }
    let mut out = RealMatrix::zeros(n);
    for i in 0..n {
        let d = c.get(i, i);
        if d <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index: i, value: d });
        }
        out.set(i, i, d.powf(p));
    }
    Ok(out)
}
