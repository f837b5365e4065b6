use std::fs;
use std::path::Path;
use std::process::ExitCode;

use resonator_modes::{
    detect_band_gap, detect_peaks, eei, figure, io, run_recovery, simulate_measurement, sym_eigen,
    ArrayConfig, Error, ModeMatrix, PeakOptions, Polarity, RecoveryOptions, RecoveryReport, Result,
};

use crate::{PolarityArg, SymmetrizeMode};

const MONOMERIC_CONFIG: &str = include_str!("../../../configs/monomeric.json");
const DIMERIC_CONFIG: &str = include_str!("../../../configs/dimeric.json");

/// 12 significant digits, for diffable numeric output.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Model mode magnitudes of a configuration, row-normalized and ordered by
/// ascending eigenvalue. Covers both branches: with equal capacitances the
/// `C^(1/2)` scaling is uniform and cancels in the normalization.
fn model_modes(cfg: &ArrayConfig) -> Result<ModeMatrix> {
    let sys = resonator_modes::build_matrices(cfg);
    let heq = eei::hermitian_equivalent(&sys)?;
    let eig = sym_eigen(&heq, 1e-12)?;
    let n = cfg.n();
    let caps = cfg.capacitances();
    let mut magnitudes = Vec::with_capacity(n * n);
    for mode in 0..n {
        for (j, &cap) in caps.iter().enumerate() {
            magnitudes.push((cap.sqrt() * eig.vectors.get(j, mode)).abs());
        }
    }
    let mut modes = ModeMatrix::new(n, magnitudes)?;
    modes.normalize_rows();
    Ok(modes)
}

fn print_spectrum_summary(ms: &resonator_modes::MeasurementSet) {
    println!("label: {}", ms.label());
    let mut freqs = ms.full_peaks_hz().to_vec();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("full spectrum ({} peaks, Hz):", freqs.len());
    for f in &freqs {
        println!("  {}", sig12(*f));
    }
    println!(
        "subspectra: {} deletions x {} peaks",
        ms.sub_peaks_hz().len(),
        ms.sub_peaks_hz().first().map_or(0, |s| s.len())
    );
    match detect_band_gap(&freqs) {
        Some(gap) => println!(
            "band gap: {} Hz between two frequency clusters ({} low / {} high peaks); cluster spreads {} / {} Hz",
            sig12(gap.gap),
            gap.split_index + 1,
            freqs.len() - gap.split_index - 1,
            sig12(gap.lower_spread),
            sig12(gap.upper_spread),
        ),
        None => println!("band gap: none detected"),
    }
}

pub fn simulate(config: &Path, noise: f64, seed: u64, out: &Path) -> Result<ExitCode> {
    let cfg = io::read_config(config)?;
    let ms = simulate_measurement(&cfg, noise, seed)?;
    io::write_measurement(&ms, out)?;
    print_spectrum_summary(&ms);
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn resolve_options(
    cfg: Option<&ArrayConfig>,
    symmetrize: SymmetrizeMode,
    non_hermitian: bool,
    zero_threshold: f64,
    degeneracy_tol: f64,
) -> Result<RecoveryOptions> {
    let symmetrize = match symmetrize {
        SymmetrizeMode::On => true,
        SymmetrizeMode::Off => false,
        SymmetrizeMode::Auto => cfg.is_some_and(|c| c.is_palindromic()),
    };
    let capacitance_ratios = match cfg {
        Some(c) => {
            let caps = c.capacitances();
            let c0 = caps[0];
            let unequal = caps.iter().any(|&v| (v - c0).abs() > 1e-9 * c0);
            if non_hermitian || unequal {
                Some(caps)
            } else {
                None
            }
        }
        None if non_hermitian => return Err(Error::MissingCapacitanceRatios),
        None => None,
    };
    Ok(RecoveryOptions {
        symmetrize,
        zero_threshold,
        degeneracy_tol,
        capacitance_ratios,
        ..Default::default()
    })
}

fn print_mode_table(modes: &ModeMatrix) {
    for (i, row) in modes.rows().enumerate() {
        let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
        println!("mode {}: {}", i + 1, cells.join(" "));
    }
}

pub fn recover(
    measurement: &Path,
    config: Option<&Path>,
    symmetrize: SymmetrizeMode,
    non_hermitian: bool,
    zero_threshold: f64,
    degeneracy_tol: f64,
    out: &Path,
) -> Result<ExitCode> {
    let ms = io::read_measurement(measurement)?;
    let cfg = config.map(io::read_config).transpose()?;
    let opts = resolve_options(
        cfg.as_ref(),
        symmetrize,
        non_hermitian,
        zero_threshold,
        degeneracy_tol,
    )?;
    let report = run_recovery(&ms, &opts)?;
    io::write_report(&report, out)?;
    println!(
        "recovered {} modes ({} branch, symmetrize {})",
        report.modes.n(),
        if opts.capacitance_ratios.is_some() {
            "non-Hermitian"
        } else {
            "Hermitian"
        },
        if opts.symmetrize { "on" } else { "off" },
    );
    print_mode_table(&report.modes);
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn peaks(
    trace: &Path,
    polarity: PolarityArg,
    min_prominence: f64,
    min_separation_hz: f64,
    expected_count: Option<usize>,
) -> Result<ExitCode> {
    let trace = io::read_trace(trace)?;
    let opts = PeakOptions {
        polarity: match polarity {
            PolarityArg::Dips => Polarity::Dips,
            PolarityArg::Peaks => Polarity::Peaks,
        },
        min_prominence,
        min_separation_hz,
        expected_count,
    };
    let found = detect_peaks(&trace, &opts)?;
    println!("{} peak(s), Hz:", found.len());
    for f in found {
        println!("  {}", sig12(f));
    }
    Ok(ExitCode::SUCCESS)
}

struct ComparisonOutcome {
    overall_max_err: f64,
}

fn compare_against_model(report: &RecoveryReport, cfg: &ArrayConfig) -> Result<ComparisonOutcome> {
    let model = model_modes(cfg)?;
    let n = report.modes.n();
    if model.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: model.n(),
        });
    }
    let mut overall: f64 = 0.0;
    for i in 0..n {
        let rec = report.modes.row(i);
        let mod_row = model.row(i);
        let max_err = rec
            .iter()
            .zip(mod_row)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let dot: f64 = rec.iter().zip(mod_row).map(|(a, b)| a * b).sum();
        let norm_rec: f64 = rec.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_mod: f64 = mod_row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cosine = if norm_rec > 0.0 && norm_mod > 0.0 {
            dot / (norm_rec * norm_mod)
        } else {
            0.0
        };
        println!(
            "mode {}: max_abs_error={} cosine_similarity={}",
            i + 1,
            sig12(max_err),
            sig12(cosine)
        );
        overall = overall.max(max_err);
    }
    println!("overall max_abs_error={}", sig12(overall));
    Ok(ComparisonOutcome {
        overall_max_err: overall,
    })
}

pub fn compare(report: &Path, config: &Path, tol: f64) -> Result<ExitCode> {
    let report = io::read_report(report)?;
    let cfg = io::read_config(config)?;
    let outcome = compare_against_model(&report, &cfg)?;
    if outcome.overall_max_err <= tol {
        println!("PASS (tol {})", sig12(tol));
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL (tol {})", sig12(tol));
        Ok(ExitCode::FAILURE)
    }
}

pub fn plot(report: &Path, config: Option<&Path>, out: &Path) -> Result<ExitCode> {
    let report = io::read_report(report)?;
    let model = config
        .map(|path| -> Result<ModeMatrix> { model_modes(&io::read_config(path)?) })
        .transpose()?;
    figure::render_figure(&report, model.as_ref(), out)?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn demo(out_dir: &Path, noise: f64, seed: u64, tol: f64) -> Result<ExitCode> {
    fs::create_dir_all(out_dir)?;
    let scenarios = [("monomeric", MONOMERIC_CONFIG), ("dimeric", DIMERIC_CONFIG)];
    let mut all_passed = true;

    for (name, config_text) in scenarios {
        println!("=== {name} scenario ===");
        let cfg = io::config_from_json(config_text)?;
        fs::write(out_dir.join(format!("{name}.config.json")), config_text)?;

        let ms = simulate_measurement(&cfg, noise, seed)?;
        print_spectrum_summary(&ms);
        let measurement_path = out_dir.join(format!("{name}.measurement.json"));
        io::write_measurement(&ms, &measurement_path)?;

        let opts = resolve_options(
            Some(&cfg),
            SymmetrizeMode::Auto,
            false,
            resonator_modes::pipeline::DEFAULT_ZERO_THRESHOLD,
            resonator_modes::pipeline::DEFAULT_DEGENERACY_TOL,
        )?;
        let report = run_recovery(&ms, &opts)?;
        let report_path = out_dir.join(format!("{name}.report.json"));
        io::write_report(&report, &report_path)?;
        for warning in &report.warnings {
            println!("warning: {warning}");
        }

        let outcome = compare_against_model(&report, &cfg)?;
        let model = model_modes(&cfg)?;
        figure::render_figure(&report, Some(&model), out_dir.join(format!("{name}.svg")))?;

        if noise == 0.0 {
            if outcome.overall_max_err <= tol {
                println!("{name}: PASS (max error {} <= tol {})", sig12(outcome.overall_max_err), sig12(tol));
            } else {
                println!("{name}: FAIL (max error {} > tol {})", sig12(outcome.overall_max_err), sig12(tol));
                all_passed = false;
            }
        } else {
            println!(
                "{name}: completed with noise sigma {} (max error {})",
                sig12(noise),
                sig12(outcome.overall_max_err)
            );
        }
        println!();
    }

    println!("demo outputs in {}", out_dir.display());
    if all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

