//! Spectral peak extraction from reflection-coefficient traces.
//!
//! Resonances show up as dips in a |S11|-versus-frequency sweep, so the
//! default polarity searches for local minima. Candidates are ranked by
//! topographic prominence, greedily filtered under a minimum separation,
//! and refined to sub-grid accuracy with a three-point parabolic fit.

use crate::error::{Error, Result};

/// A magnitude-versus-frequency sweep with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    points: Vec<(f64, f64)>,
}

impl Trace {
    /// At least three points, strictly increasing frequency, finite
    /// nonnegative magnitudes.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewPoints {
                min: 3,
                got: points.len(),
            });
        }
        for (idx, &(f, m)) in points.iter().enumerate() {
            if !f.is_finite() || !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidMeasurement(format!(
                    "trace point {idx} must have finite frequency and nonnegative magnitude"
                )));
            }
            if idx > 0 && f <= points[idx - 1].0 {
                return Err(Error::InvalidMeasurement(format!(
                    "trace frequency must be strictly increasing at point {idx}"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Resonances absorb; |S11| drops. The default for reflection sweeps.
    Dips,
    Peaks,
}

#[derive(Debug, Clone)]
pub struct PeakOptions {
    pub polarity: Polarity,
    /// Minimum prominence as a fraction of the trace magnitude range, in (0, 1).
    pub min_prominence: f64,
    pub min_separation_hz: f64,
    /// When set, the detector errors out unless exactly this many peaks are found.
    pub expected_count: Option<usize>,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            polarity: Polarity::Dips,
            min_prominence: 0.1,
            min_separation_hz: 0.0,
            expected_count: None,
        }
    }
}

impl PeakOptions {
    fn validate(&self) -> Result<()> {
        if !(self.min_prominence > 0.0 && self.min_prominence < 1.0) {
            return Err(Error::InvalidOptions(format!(
                "min_prominence must be in (0, 1), got {}",
                self.min_prominence
            )));
        }
        if !(self.min_separation_hz >= 0.0 && self.min_separation_hz.is_finite()) {
            return Err(Error::InvalidOptions(format!(
                "min_separation_hz must be nonnegative, got {}",
                self.min_separation_hz
            )));
        }
        Ok(())
    }
}

/// Detects extremum locations in a trace, ascending in frequency.
pub fn detect_peaks(trace: &Trace, opts: &PeakOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    let pts = trace.points();
    let len = pts.len();

    // Work on a signal whose peaks are maxima regardless of polarity.
    let y: Vec<f64> = match opts.polarity {
        Polarity::Peaks => pts.iter().map(|&(_, m)| m).collect(),
        Polarity::Dips => pts.iter().map(|&(_, m)| -m).collect(),
    };
    let y_max = y.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let y_min = y.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let range = y_max - y_min;

    let mut candidates: Vec<(usize, f64)> = Vec::new();
    if range > 0.0 {
        for i in 1..len - 1 {
            if y[i] > y[i - 1] && y[i] > y[i + 1] {
                let prom = prominence(&y, i);
                if prom >= opts.min_prominence * range {
                    candidates.push((i, prom));
                }
            }
        }
    }

    // Greedy selection by descending prominence under the separation
    // constraint; index order breaks prominence ties deterministically.
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut accepted: Vec<usize> = Vec::new();
    for &(i, _) in &candidates {
        let fi = pts[i].0;
        if accepted
            .iter()
            .all(|&k| (pts[k].0 - fi).abs() >= opts.min_separation_hz)
        {
            accepted.push(i);
        }
    }

    let mut freqs: Vec<f64> = accepted
        .iter()
        .map(|&i| refine_parabolic(pts, &y, i))
        .collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    if let Some(expected) = opts.expected_count {
        if freqs.len() != expected {
            return Err(Error::PeakCountMismatch {
                expected,
                found: freqs.len(),
            });
        }
    }
    Ok(freqs)
}

/// Topographic prominence of the local maximum at `i`: its height above the
/// higher of the two valley floors that separate it from taller terrain (or
/// from the trace ends).
fn prominence(y: &[f64], i: usize) -> f64 {
    let mut left_min = y[i];
    let mut k = i;
    while k > 0 {
        k -= 1;
        if y[k] > y[i] {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = y[i];
    let mut k = i;
    while k < y.len() - 1 {
        k += 1;
        if y[k] > y[i] {
            break;
        }
        right_min = right_min.min(y[k]);
    }
    y[i] - left_min.max(right_min)
}

/// Vertex of the parabola through the extremal sample and its neighbors;
/// handles nonuniform frequency grids. Falls back to the sample location
/// when the three points are collinear.
fn refine_parabolic(pts: &[(f64, f64)], y: &[f64], i: usize) -> f64 {
    let (x0, x1, x2) = (pts[i - 1].0, pts[i].0, pts[i + 1].0);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return x1;
    }
    let a = (x2 * (y1 - y0) + x0 * (y2 - y1) + x1 * (y0 - y2)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x0 * x0 * (y1 - y2) + x1 * x1 * (y2 - y0)) / denom;
    if a == 0.0 {
        return x1;
    }
    (-b / (2.0 * a)).clamp(x0, x2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian_dip_trace(centers: &[f64], half_width: f64, lo: f64, hi: f64, step: f64) -> Trace {
        let mut points = Vec::new();
        let mut f = lo;
        while f <= hi {
            let mut m = 1.0;
            for &c in centers {
                let d = f - c;
                m -= 0.8 * half_width * half_width / (d * d + half_width * half_width)
                    / centers.len() as f64;
            }
            points.push((f, m.max(0.0)));
            f += step;
        }
        Trace::new(points).unwrap()
    }

    #[test]
    fn monotone_trace_has_no_peaks() {
        let pts: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, i as f64 * 0.1)).collect();
        let trace = Trace::new(pts).unwrap();
        let found = detect_peaks(&trace, &PeakOptions::default()).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn constant_trace_has_no_peaks() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.0)).collect();
        let trace = Trace::new(pts).unwrap();
        let found = detect_peaks(&trace, &PeakOptions::default()).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn single_lorentzian_dip_refined_below_grid() {
        // 100 points per MHz, dip at 200 MHz with 1 MHz half width.
        let trace = lorentzian_dip_trace(&[200e6], 1e6, 190e6, 210e6, 0.01e6);
        let found = detect_peaks(&trace, &PeakOptions::default()).unwrap();
        assert_eq!(found.len(), 1);
        assert!(
            (found[0] - 200e6).abs() < 0.02e6,
            "refined peak {} off by {}",
            found[0],
            (found[0] - 200e6).abs()
        );
    }

    #[test]
    fn two_dips_returned_ascending() {
        let trace = lorentzian_dip_trace(&[190e6, 210e6], 1e6, 180e6, 220e6, 0.02e6);
        let opts = PeakOptions {
            min_separation_hz: 5e6,
            ..Default::default()
        };
        let found = detect_peaks(&trace, &opts).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found[0] < found[1]);
        assert!((found[0] - 190e6).abs() < 0.05e6);
        assert!((found[1] - 210e6).abs() < 0.05e6);
    }

    #[test]
    fn expected_count_mismatch_reports_found() {
        let trace = lorentzian_dip_trace(&[200e6], 1e6, 190e6, 210e6, 0.05e6);
        let opts = PeakOptions {
            expected_count: Some(3),
            ..Default::default()
        };
        match detect_peaks(&trace, &opts) {
            Err(Error::PeakCountMismatch {
                expected: 3,
                found: 1,
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn peaks_polarity_finds_maxima() {
        let pts: Vec<(f64, f64)> = (0..101)
            .map(|i| {
                let x = i as f64;
                (x, 1.0 + (-((x - 50.0) / 5.0).powi(2)).exp())
            })
            .collect();
        let trace = Trace::new(pts).unwrap();
        let opts = PeakOptions {
            polarity: Polarity::Peaks,
            ..Default::default()
        };
        let found = detect_peaks(&trace, &opts).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0] - 50.0).abs() < 0.1);
    }

    #[test]
    fn trace_validation() {
        assert!(matches!(
            Trace::new(vec![(1.0, 1.0), (2.0, 1.0)]),
            Err(Error::TooFewPoints { min: 3, got: 2 })
        ));
        assert!(matches!(
            Trace::new(vec![(1.0, 1.0), (1.0, 1.0), (2.0, 1.0)]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(matches!(
            Trace::new(vec![(1.0, 1.0), (2.0, -0.5), (3.0, 1.0)]),
            Err(Error::InvalidMeasurement(_))
        ));
    }

    #[test]
    fn option_validation() {
        let trace = Trace::new(vec![(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).unwrap();
        let opts = PeakOptions {
            min_prominence: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            detect_peaks(&trace, &opts),
            Err(Error::InvalidOptions(_))
        ));
    }
}
