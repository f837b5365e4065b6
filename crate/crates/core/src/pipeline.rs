//! The successive single deletion procedure on measured spectra.
//!
//! A measurement consists of the resonance frequencies of the intact array
//! and of each single-deletion subsystem. Recovery converts frequencies to
//! model eigenvalues, optionally symmetrizes mirror-equivalent subspectra,
//! reconciles the subspectra with the Cauchy interlacing inequalities by
//! clamping, evaluates the mode magnitudes, applies the non-Hermitian
//! correction when capacitance ratios are available, and row-normalizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::eei::{
    correct_nonhermitian, thompson_modes_detailed, ModeMatrix, Spectrum, SubspectraSet,
};
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::{
    build_matrices, delete_resonator, freq_to_lambda, lambda_to_freq, system_spectrum, ArrayConfig,
};

pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Measured resonance peak frequencies for the intact array and for each
/// single-deletion subsystem (entry j = element j removed).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    label: String,
    full_peaks_hz: Vec<f64>,
    sub_peaks_hz: Vec<Vec<f64>>,
}

impl MeasurementSet {
    pub fn new(
        label: impl Into<String>,
        full_peaks_hz: Vec<f64>,
        sub_peaks_hz: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = full_peaks_hz.len();
        if n == 0 {
            return Err(Error::InvalidMeasurement(
                "at least one full-spectrum peak is required".into(),
            ));
        }
        if sub_peaks_hz.len() != n {
            return Err(Error::InvalidMeasurement(format!(
                "expected {} subspectra, got {}",
                n,
                sub_peaks_hz.len()
            )));
        }
        for (j, sub) in sub_peaks_hz.iter().enumerate() {
            if sub.len() != n - 1 {
                return Err(Error::InvalidMeasurement(format!(
                    "subspectrum {} has {} peaks, expected {}",
                    j + 1,
                    sub.len(),
                    n - 1
                )));
            }
        }
        for &f in full_peaks_hz.iter().chain(sub_peaks_hz.iter().flatten()) {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::InvalidMeasurement(format!(
                    "peak frequencies must be positive and finite, got {f}"
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            full_peaks_hz,
            sub_peaks_hz,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.full_peaks_hz.len()
    }

    pub fn full_peaks_hz(&self) -> &[f64] {
        &self.full_peaks_hz
    }

    pub fn sub_peaks_hz(&self) -> &[Vec<f64>] {
        &self.sub_peaks_hz
    }
}

/// Knobs for [`run_recovery`]. `capacitance_ratios` selects the
/// non-Hermitian branch; without them the Hermitian branch is assumed.
/// The noise fields only drive simulation defaults, never recovery itself.
#[derive(Debug, Clone)]
pub struct RecoveryOptions {
    pub symmetrize: bool,
    pub zero_threshold: f64,
    pub degeneracy_tol: f64,
    pub capacitance_ratios: Option<Vec<f64>>,
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            symmetrize: false,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            capacitance_ratios: None,
            noise_sigma: 0.0,
            noise_seed: 0,
        }
    }
}

impl RecoveryOptions {
    fn validate(&self, n: usize) -> Result<()> {
        if !(self.zero_threshold > 0.0 && self.zero_threshold.is_finite()) {
            return Err(Error::NonPositiveInput {
                name: "zero_threshold",
                value: self.zero_threshold,
            });
        }
        if !(self.degeneracy_tol > 0.0 && self.degeneracy_tol.is_finite()) {
            return Err(Error::NonPositiveInput {
                name: "degeneracy_tol",
                value: self.degeneracy_tol,
            });
        }
        if let Some(ratios) = &self.capacitance_ratios {
            if ratios.len() != n {
                return Err(Error::InvalidOptions(format!(
                    "expected {} capacitance ratios, got {}",
                    n,
                    ratios.len()
                )));
            }
            for &r in ratios {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::NonPositiveInput {
                        name: "capacitance_ratios",
                        value: r,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Everything the pipeline produced: the recovered row-normalized modes,
/// the adjusted spectra it used, the per-value adjustments applied along
/// the way, and human-readable warnings.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub modes: ModeMatrix,
    pub lambda_full: Spectrum,
    pub lambda_subs: SubspectraSet,
    pub repair_deltas: Vec<Vec<f64>>,
    pub symmetrization_deltas: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Converts peak frequencies to eigenvalues `lambda = omega^-2` and sorts
/// every list ascending (ascending lambda is descending frequency).
pub fn sort_and_convert(ms: &MeasurementSet) -> Result<(Spectrum, SubspectraSet)> {
    let full: Vec<f64> = ms
        .full_peaks_hz
        .iter()
        .map(|&f| freq_to_lambda(f))
        .collect::<Result<_>>()?;
    let full = Spectrum::from_unsorted(full)?;
    let mut subs = Vec::with_capacity(ms.n());
    for peaks in &ms.sub_peaks_hz {
        let lam: Vec<f64> = peaks
            .iter()
            .map(|&f| freq_to_lambda(f))
            .collect::<Result<_>>()?;
        subs.push(Spectrum::from_unsorted(lam)?);
    }
    Ok((full, SubspectraSet::new(subs)?))
}

/// Replaces each mirror pair of subspectra (deletions j and n-1-j) by their
/// elementwise mean; the middle entry of an odd-length set is untouched.
/// Only meaningful for arrays whose base-frequency profile is palindromic.
pub fn symmetrize_subspectra(subs: &SubspectraSet) -> SubspectraSet {
    let n = subs.n();
    let mut out: Vec<Vec<f64>> = subs
        .by_deletion()
        .iter()
        .map(|s| s.values().to_vec())
        .collect();
    for j in 0..n / 2 {
        let k = n - 1 - j;
        for idx in 0..out[j].len() {
            let mean = 0.5 * (out[j][idx] + out[k][idx]);
            out[j][idx] = mean;
            out[k][idx] = mean;
        }
    }
    let spectra = out
        .into_iter()
        .map(|v| Spectrum::new(v).expect("mean of sorted lists is sorted"))
        .collect();
    SubspectraSet::new(spectra).expect("shape unchanged")
}

/// Clamps every subspectrum value into its Cauchy interlacing interval
/// `[lambda_i, lambda_{i+1}]`. The full spectrum is trusted as-is; only
/// subspectra are adjusted. Returns the repaired set and the per-value
/// deltas (new - old).
pub fn interlacing_repair(
    full: &Spectrum,
    subs: &SubspectraSet,
) -> Result<(SubspectraSet, Vec<Vec<f64>>)> {
    let n = full.len();
    if subs.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: subs.n(),
        });
    }
    let lambda = full.values();
    let mut repaired = Vec::with_capacity(n);
    let mut deltas = Vec::with_capacity(n);
    for sub in subs.by_deletion() {
        let mut new_values = Vec::with_capacity(sub.len());
        let mut sub_deltas = Vec::with_capacity(sub.len());
        for (i, &mu) in sub.values().iter().enumerate() {
            let clamped = mu.max(lambda[i]).min(lambda[i + 1]);
            sub_deltas.push(clamped - mu);
            new_values.push(clamped);
        }
        repaired.push(Spectrum::new(new_values)?);
        deltas.push(sub_deltas);
    }
    Ok((SubspectraSet::new(repaired)?, deltas))
}

/// Runs the whole procedure on a measurement: sort and convert, optional
/// symmetrization, interlacing repair, mode estimation, the non-Hermitian
/// correction when ratios are present, and row normalization.
pub fn run_recovery(ms: &MeasurementSet, opts: &RecoveryOptions) -> Result<RecoveryReport> {
    opts.validate(ms.n())?;
    let (full, raw_subs) = sort_and_convert(ms)?;

    let (subs, symmetrization_deltas) = if opts.symmetrize {
        let symmetrized = symmetrize_subspectra(&raw_subs);
        let deltas = elementwise_deltas(&symmetrized, &raw_subs);
        (symmetrized, deltas)
    } else {
        let zeros = raw_subs
            .by_deletion()
            .iter()
            .map(|s| vec![0.0; s.len()])
            .collect();
        (raw_subs, zeros)
    };

    let (subs, repair_deltas) = interlacing_repair(&full, &subs)?;

    let (t_modes, zeroed) =
        thompson_modes_detailed(&full, &subs, opts.zero_threshold, opts.degeneracy_tol)?;

    let modes = match &opts.capacitance_ratios {
        Some(ratios) => {
            let c = RealMatrix::from_diagonal(ratios);
            correct_nonhermitian(&t_modes, &c)?
        }
        None => {
            let mut m = t_modes;
            m.normalize_rows();
            m
        }
    };

    let mut warnings = Vec::new();
    for (mode, component) in &zeroed {
        warnings.push(format!(
            "mode {} component {} fell below the zero threshold and was set to 0",
            mode + 1,
            component + 1
        ));
    }
    let adjusted: usize = repair_deltas
        .iter()
        .flatten()
        .filter(|d| **d != 0.0)
        .count();
    if adjusted > 0 {
        let max_delta = repair_deltas
            .iter()
            .flatten()
            .fold(0.0f64, |acc, d| acc.max(d.abs()));
        warnings.push(format!(
            "interlacing repair adjusted {adjusted} subspectrum value(s), max |delta| = {max_delta:.6e} s^2"
        ));
    }

    Ok(RecoveryReport {
        modes,
        lambda_full: full,
        lambda_subs: subs,
        repair_deltas,
        symmetrization_deltas,
        warnings,
    })
}

fn elementwise_deltas(new: &SubspectraSet, old: &SubspectraSet) -> Vec<Vec<f64>> {
    new.by_deletion()
        .iter()
        .zip(old.by_deletion())
        .map(|(a, b)| {
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| x - y)
                .collect()
        })
        .collect()
}

/// In-silico stand-in for the measurement steps: computes the model
/// spectrum and all deletion spectra, converts to frequencies (ascending),
/// and multiplies each by `1 + eps` with `eps ~ N(0, noise_sigma)` drawn
/// from a ChaCha8 generator seeded with `seed`. Deterministic per seed.
pub fn simulate_measurement(
    cfg: &ArrayConfig,
    noise_sigma: f64,
    seed: u64,
) -> Result<MeasurementSet> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidOptions(format!(
            "noise_sigma must be nonnegative, got {noise_sigma}"
        )));
    }
    let full_lambda = system_spectrum(&build_matrices(cfg))?;
    let mut full: Vec<f64> = full_lambda
        .values()
        .iter()
        .map(|&l| lambda_to_freq(l))
        .collect::<Result<_>>()?;
    full.reverse(); // ascending frequency

    let n = cfg.n();
    let mut subs = Vec::with_capacity(n);
    for j in 0..n {
        if n == 1 {
            // Removing the only resonator leaves nothing to resonate.
            subs.push(Vec::new());
            continue;
        }
        let sub_lambda = system_spectrum(&delete_resonator(cfg, j)?)?;
        let mut freqs: Vec<f64> = sub_lambda
            .values()
            .iter()
            .map(|&l| lambda_to_freq(l))
            .collect::<Result<_>>()?;
        freqs.reverse();
        subs.push(freqs);
    }

    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma)
            .map_err(|e| Error::InvalidOptions(format!("noise model: {e}")))?;
        for f in full.iter_mut().chain(subs.iter_mut().flatten()) {
            *f *= 1.0 + normal.sample(&mut rng);
        }
    }

    let label = format!("simulated n={n} seed={seed} noise_sigma={noise_sigma:e}");
    MeasurementSet::new(label, full, subs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(values: &[f64]) -> Spectrum {
        Spectrum::new(values.to_vec()).unwrap()
    }

    fn demo_config() -> ArrayConfig {
        ArrayConfig::new(1e-7, vec![200e6; 5], vec![-0.12, -0.04, -0.015, -0.006]).unwrap()
    }

    #[test]
    fn sort_and_convert_reverses_frequency_order() {
        let ms = MeasurementSet::new(
            "t",
            vec![210e6, 190e6],
            vec![vec![200e6], vec![205e6]],
        )
        .unwrap();
        let (full, subs) = sort_and_convert(&ms).unwrap();
        // Larger frequency means smaller lambda, so lambda(210 MHz) comes first.
        assert_eq!(full.values()[0], freq_to_lambda(210e6).unwrap());
        assert_eq!(full.values()[1], freq_to_lambda(190e6).unwrap());
        assert_eq!(subs.get(0).values()[0], freq_to_lambda(200e6).unwrap());
    }

    #[test]
    fn sort_and_convert_keeps_sorted_input() {
        // Descending frequencies are already ascending in lambda.
        let ms = MeasurementSet::new(
            "t",
            vec![210e6, 190e6],
            vec![vec![200e6], vec![205e6]],
        )
        .unwrap();
        let (a, _) = sort_and_convert(&ms).unwrap();
        let ms_rev = MeasurementSet::new(
            "t",
            vec![190e6, 210e6],
            vec![vec![200e6], vec![205e6]],
        )
        .unwrap();
        let (b, _) = sort_and_convert(&ms_rev).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetrize_averages_mirror_pairs() {
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.0, 2.0]),
            spectrum(&[5.0, 6.0]),
            spectrum(&[1.2, 2.2]),
        ])
        .unwrap();
        let out = symmetrize_subspectra(&subs);
        assert_eq!(out.get(0).values(), &[1.1, 2.1]);
        assert_eq!(out.get(2).values(), &[1.1, 2.1]);
        // Middle entry untouched.
        assert_eq!(out.get(1).values(), &[5.0, 6.0]);
    }

    #[test]
    fn symmetrize_is_idempotent() {
        let subs = SubspectraSet::new(vec![
            spectrum(&[1.0, 2.0]),
            spectrum(&[5.0, 6.0]),
            spectrum(&[1.2, 2.2]),
        ])
        .unwrap();
        let once = symmetrize_subspectra(&subs);
        let twice = symmetrize_subspectra(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn repair_clamps_into_intervals() {
        let full = spectrum(&[1.0, 2.0, 3.0]);

        let consistent = SubspectraSet::new(vec![
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        let (repaired, deltas) = interlacing_repair(&full, &consistent).unwrap();
        assert_eq!(repaired, consistent);
        assert!(deltas.iter().flatten().all(|d| *d == 0.0));

        let low = SubspectraSet::new(vec![
            spectrum(&[0.9, 2.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        let (repaired, deltas) = interlacing_repair(&full, &low).unwrap();
        assert_eq!(repaired.get(0).values(), &[1.0, 2.5]);
        assert!((deltas[0][0] - 0.1).abs() < 1e-15);

        let high_first = SubspectraSet::new(vec![
            spectrum(&[2.4, 2.5]),
            spectrum(&[1.5, 2.5]),
            spectrum(&[1.5, 2.5]),
        ])
        .unwrap();
        let (repaired, _) = interlacing_repair(&full, &high_first).unwrap();
        // First value clamps to the upper bound of its interval, lambda_2.
        assert_eq!(repaired.get(0).values(), &[2.0, 2.5]);
    }

    #[test]
    fn simulate_zero_noise_matches_model_exactly() {
        let cfg = demo_config();
        let ms = simulate_measurement(&cfg, 0.0, 3).unwrap();
        let expected = system_spectrum(&build_matrices(&cfg)).unwrap();
        let mut freqs: Vec<f64> = expected
            .values()
            .iter()
            .map(|&l| lambda_to_freq(l).unwrap())
            .collect();
        freqs.reverse();
        assert_eq!(ms.full_peaks_hz(), freqs.as_slice());
        assert_eq!(ms.sub_peaks_hz().len(), 5);
        assert!(ms.sub_peaks_hz().iter().all(|s| s.len() == 4));
    }

    #[test]
    fn simulate_is_deterministic_per_seed() {
        let cfg = demo_config();
        let a = simulate_measurement(&cfg, 1e-4, 42).unwrap();
        let b = simulate_measurement(&cfg, 1e-4, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_measurement(&cfg, 1e-4, 43).unwrap();
        assert_ne!(a.full_peaks_hz(), c.full_peaks_hz());
    }

    #[test]
    fn simulate_single_element() {
        let cfg = ArrayConfig::new(1e-7, vec![200e6], vec![]).unwrap();
        let ms = simulate_measurement(&cfg, 0.0, 0).unwrap();
        assert_eq!(ms.n(), 1);
        assert_eq!(ms.sub_peaks_hz(), &[Vec::<f64>::new()]);
        let report = run_recovery(&ms, &RecoveryOptions::default()).unwrap();
        assert_eq!(report.modes.get(0, 0), 1.0);
    }

    #[test]
    fn recovery_report_shapes() {
        let cfg = demo_config();
        let ms = simulate_measurement(&cfg, 0.0, 1).unwrap();
        let opts = RecoveryOptions {
            symmetrize: true,
            ..Default::default()
        };
        let report = run_recovery(&ms, &opts).unwrap();
        assert_eq!(report.modes.n(), 5);
        assert_eq!(report.lambda_full.len(), 5);
        assert_eq!(report.lambda_subs.n(), 5);
        assert_eq!(report.repair_deltas.len(), 5);
        assert_eq!(report.symmetrization_deltas.len(), 5);
        // Rows normalized.
        for row in report.modes.rows() {
            let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_validation() {
        let cfg = demo_config();
        let ms = simulate_measurement(&cfg, 0.0, 1).unwrap();
        let opts = RecoveryOptions {
            capacitance_ratios: Some(vec![1.0, 1.0]),
            ..Default::default()
        };
        assert!(matches!(
            run_recovery(&ms, &opts),
            Err(Error::InvalidOptions(_))
        ));
        let opts = RecoveryOptions {
            capacitance_ratios: Some(vec![1.0, 1.0, -1.0, 1.0, 1.0]),
            ..Default::default()
        };
        assert!(matches!(
            run_recovery(&ms, &opts),
            Err(Error::NonPositiveInput { .. })
        ));
    }

    #[test]
    fn measurement_validation() {
        assert!(matches!(
            MeasurementSet::new("t", vec![], vec![]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(matches!(
            MeasurementSet::new("t", vec![200e6], vec![vec![100e6]]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(matches!(
            MeasurementSet::new("t", vec![200e6, -1.0], vec![vec![1.0], vec![1.0]]),
            Err(Error::InvalidMeasurement(_))
        ));
    }
}
