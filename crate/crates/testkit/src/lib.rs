//! Test-only oracles and fixture generators.
//!
//! The eigenvalue oracle here is deliberately independent of the library's
//! Jacobi solver: it locates the roots of the characteristic polynomial
//! `det(A - lambda I)` by scanning for sign changes of an LU-factored
//! determinant and bisecting each bracket. It works on any real square
//! matrix with real eigenvalues, including the non-symmetric `H = CM`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resonator_modes::{ArrayConfig, RealMatrix, Trace};

/// Seeded generator shared by all fixtures, stable across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Determinant by LU factorization with partial pivoting.
pub fn lu_det(matrix: &RealMatrix) -> f64 {
    let n = matrix.dim();
    if n == 0 {
        return 1.0;
    }
    let mut a: Vec<f64> = matrix.entries().to_vec();
    let mut sign = 1.0f64;
    for col in 0..n {
        let mut pivot = col;
        let mut pivot_abs = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot = row;
            }
        }
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            sign = -sign;
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / d;
            a[row * n + col] = 0.0;
            for k in (col + 1)..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
        }
    }
    let mut det = sign;
    for i in 0..n {
        det *= a[i * n + i];
    }
    det
}

fn det_shifted(matrix: &RealMatrix, shift: f64) -> f64 {
    let n = matrix.dim();
    let mut shifted = matrix.clone();
    for i in 0..n {
        shifted.set(i, i, matrix.get(i, i) - shift);
    }
    lu_det(&shifted)
}

/// Gershgorin interval containing every real eigenvalue (row discs).
pub fn gershgorin_bounds(matrix: &RealMatrix) -> (f64, f64) {
    let n = matrix.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        for j in 0..n {
            if j != i {
                radius += matrix.get(i, j).abs();
            }
        }
        lo = lo.min(matrix.get(i, i) - radius);
        hi = hi.max(matrix.get(i, i) + radius);
    }
    (lo, hi)
}

/// All real eigenvalues of `matrix` found as sign changes of
/// `det(A - lambda I)` on a refined grid, each bisected to `rel_tol`
/// relative width. Returns `None` when the grid cannot isolate `n` simple
/// roots (clustered or multiple eigenvalues).
pub fn char_poly_roots(matrix: &RealMatrix, rel_tol: f64) -> Option<Vec<f64>> {
    let n = matrix.dim();
    if n == 0 {
        return Some(Vec::new());
    }
    let (lo, hi) = gershgorin_bounds(matrix);
    let width = (hi - lo).max(hi.abs().max(lo.abs()) * 1e-12).max(1e-300);
    let lo = lo - 1e-3 * width;
    let hi = hi + 1e-3 * width;

    let mut grid_size = 4096usize;
    while grid_size <= 1 << 17 {
        let mut brackets: Vec<(f64, f64)> = Vec::new();
        let step = (hi - lo) / grid_size as f64;
        let mut prev_x = lo;
        let mut prev_det = det_shifted(matrix, prev_x);
        for k in 1..=grid_size {
            let x = lo + step * k as f64;
            let det = det_shifted(matrix, x);
            if prev_det == 0.0 {
                // Grid point landed exactly on a root; nudge the bracket.
                brackets.push((prev_x - 0.5 * step, prev_x + 0.5 * step));
            } else if det != 0.0 && det.signum() != prev_det.signum() {
                brackets.push((prev_x, x));
            }
            prev_x = x;
            prev_det = det;
        }
        if brackets.len() == n {
            let roots = brackets
                .into_iter()
                .map(|(a, b)| bisect_root(matrix, a, b, rel_tol))
                .collect();
            return Some(roots);
        }
        grid_size *= 2;
    }
    None
}

fn bisect_root(matrix: &RealMatrix, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let mut fa = det_shifted(matrix, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) || mid == a || mid == b {
            return mid;
        }
        let fm = det_shifted(matrix, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Random symmetric matrix with entries uniform in [-1, 1].
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> RealMatrix {
    let mut m = RealMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Random physically plausible array configuration: 2..=8 elements, base
/// frequencies in the VHF range, and a decaying coupling profile.
pub fn random_config(rng: &mut ChaCha8Rng) -> ArrayConfig {
    let n: usize = rng.random_range(2..=8);
    let inductance: f64 = 1e-7 * rng.random_range(0.5..2.0);
    let freqs: Vec<f64> = (0..n).map(|_| rng.random_range(150e6..280e6)).collect();
    let mut kappas = Vec::with_capacity(n - 1);
    let mut magnitude: f64 = rng.random_range(0.05..0.2);
    for _ in 0..n - 1 {
        let sign = if rng.random_bool(0.8) { -1.0 } else { 1.0 };
        kappas.push(sign * magnitude);
        magnitude *= rng.random_range(0.2..0.5);
    }
    ArrayConfig::new(inductance, freqs, kappas).expect("generated config is valid")
}

/// Synthetic reflection trace: unit baseline with a Lorentzian dip at each
/// center. Plumbing for detector tests, not a lineshape claim.
pub fn lorentzian_dip_trace(
    centers_hz: &[f64],
    half_width_hz: f64,
    margin_hz: f64,
    step_hz: f64,
) -> Trace {
    let lo = centers_hz.iter().cloned().fold(f64::INFINITY, f64::min) - margin_hz;
    let hi = centers_hz.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + margin_hz;
    let mut points = Vec::new();
    let mut f = lo;
    let depth = 0.8 / centers_hz.len() as f64;
    while f <= hi {
        let mut m = 1.0;
        for &c in centers_hz {
            let d = f - c;
            m -= depth * half_width_hz * half_width_hz
                / (d * d + half_width_hz * half_width_hz);
        }
        points.push((f, m.max(0.0)));
        f += step_hz;
    }
    Trace::new(points).expect("synthetic trace is valid")
}

/// Minimum consecutive gap of an ascending list.
pub fn min_gap(sorted: &[f64]) -> f64 {
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}
