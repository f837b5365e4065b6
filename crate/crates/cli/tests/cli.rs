//! End-to-end tests of the `resmodes` binary: exit codes, file outputs,
//! and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use resonator_modes::{io, simulate_measurement, MeasurementSet};

fn resmodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resmodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config_path(name: &str) -> String {
    format!(
        "{}/../../configs/{name}.json",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn simulate_writes_counts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let output = resmodes(&[
            "simulate",
            "--config",
            &config_path("monomeric"),
            "--noise",
            "1e-4",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());

    let ms = io::read_measurement(&out_a).unwrap();
    assert_eq!(ms.full_peaks_hz().len(), 5);
    assert_eq!(ms.sub_peaks_hz().len(), 5);
    assert!(ms.sub_peaks_hz().iter().all(|s| s.len() == 4));
}

#[test]
fn simulate_dimeric_summary_flags_band_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let output = resmodes(&[
        "simulate",
        "--config",
        &config_path("dimeric"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(
        text.contains("band gap:") && text.contains("two frequency clusters"),
        "summary missing band gap: {text}"
    );

    let output = resmodes(&[
        "simulate",
        "--config",
        &config_path("monomeric"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout_of(&output).contains("band gap: none detected"));
}

#[test]
fn recover_then_compare_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let measurement = dir.path().join("m.json");
    let report = dir.path().join("r.json");
    let config = config_path("dimeric");

    let output = resmodes(&[
        "simulate",
        "--config",
        &config,
        "--out",
        measurement.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));

    let output = resmodes(&[
        "recover",
        "--measurement",
        measurement.to_str().unwrap(),
        "--config",
        &config,
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    assert!(stdout_of(&output).contains("non-Hermitian branch"));

    let output = resmodes(&[
        "compare",
        report.to_str().unwrap(),
        "--config",
        &config,
        "--tol",
        "1e-8",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    assert!(stdout_of(&output).contains("PASS"));

    // Against the wrong config the same report must fail a tight tolerance.
    let output = resmodes(&[
        "compare",
        report.to_str().unwrap(),
        "--config",
        &config_path("monomeric"),
        "--tol",
        "1e-8",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout_of(&output).contains("FAIL"));
}

#[test]
fn compare_is_exactly_zero_on_identical_modes() {
    // A report whose mode matrix is bit-identical to the model modes must
    // compare with exactly zero error, passing --tol 0.
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("dimeric");
    let cfg = io::read_config(&config).unwrap();

    let sys = resonator_modes::build_matrices(&cfg);
    let heq = resonator_modes::hermitian_equivalent(&sys).unwrap();
    let eig = resonator_modes::sym_eigen(&heq, 1e-12).unwrap();
    let caps = cfg.capacitances();
    let n = cfg.n();
    let mut magnitudes = Vec::with_capacity(n * n);
    for mode in 0..n {
        for (j, &cap) in caps.iter().enumerate() {
            magnitudes.push((cap.sqrt() * eig.vectors.get(j, mode)).abs());
        }
    }
    let mut modes = resonator_modes::ModeMatrix::new(n, magnitudes).unwrap();
    modes.normalize_rows();

    let ms = simulate_measurement(&cfg, 0.0, 2).unwrap();
    let opts = resonator_modes::RecoveryOptions {
        symmetrize: true,
        capacitance_ratios: Some(cfg.capacitances()),
        ..Default::default()
    };
    let mut report = resonator_modes::run_recovery(&ms, &opts).unwrap();
    report.modes = modes;
    let report_path = dir.path().join("r.json");
    io::write_report(&report, &report_path).unwrap();

    let output = resmodes(&[
        "compare",
        report_path.to_str().unwrap(),
        "--config",
        &config,
        "--tol",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    assert!(stdout_of(&output).contains("overall max_abs_error=0"));
}

#[test]
fn non_hermitian_without_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let measurement = dir.path().join("m.json");
    resmodes(&[
        "simulate",
        "--config",
        &config_path("dimeric"),
        "--out",
        measurement.to_str().unwrap(),
    ]);
    let output = resmodes(&[
        "recover",
        "--measurement",
        measurement.to_str().unwrap(),
        "--non-hermitian",
        "--out",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("capacitance ratios"),
        "stderr: {stderr}"
    );
}

#[test]
fn recover_repairs_interlacing_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = io::read_config(config_path("monomeric")).unwrap();
    let clean = simulate_measurement(&cfg, 0.0, 3).unwrap();
    // Push one subspectrum value past its upper interlacing bound. Ascending
    // frequency index 2 of a 4-peak list is lambda index 1, whose interval
    // ends at full-spectrum lambda index 2.
    let full_lambda: Vec<f64> = clean
        .full_peaks_hz()
        .iter()
        .rev()
        .map(|&f| resonator_modes::freq_to_lambda(f).unwrap())
        .collect();
    let violating = full_lambda[2] + 0.01 * (full_lambda[2] - full_lambda[1]);
    let mut subs = clean.sub_peaks_hz().to_vec();
    subs[1][2] = resonator_modes::lambda_to_freq(violating).unwrap();
    let ms = MeasurementSet::new("violated", clean.full_peaks_hz().to_vec(), subs).unwrap();
    let measurement = dir.path().join("m.json");
    io::write_measurement(&ms, &measurement).unwrap();

    let report_path = dir.path().join("r.json");
    let output = resmodes(&[
        "recover",
        "--measurement",
        measurement.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));

    let report = io::read_report(&report_path).unwrap();
    let adjusted = report
        .repair_deltas
        .iter()
        .flatten()
        .filter(|d| **d != 0.0)
        .count();
    assert!(adjusted > 0, "expected nonzero repair deltas");
}

#[test]
fn peaks_reads_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("trace.csv");
    let trace = resonator_modes_testkit::lorentzian_dip_trace(
        &[190e6, 205e6, 221e6],
        0.4e6,
        5e6,
        0.05e6,
    );
    fs::write(&trace_path, io::trace_to_csv(&trace)).unwrap();

    let output = resmodes(&[
        "peaks",
        trace_path.to_str().unwrap(),
        "--min-separation-hz",
        "2e6",
        "--expected-count",
        "3",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    assert!(stdout_of(&output).contains("3 peak(s)"));

    // Expected-count mismatch is an input error.
    let output = resmodes(&[
        "peaks",
        trace_path.to_str().unwrap(),
        "--expected-count",
        "5",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn malformed_inputs_give_schema_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad_config = dir.path().join("bad.json");
    fs::write(
        &bad_config,
        r#"{"n": 2, "inductance_h": 1e-7, "base_frequencies_hz": [2e8, 2e8], "coupling_coefficients": [-0.1], "extra": 1}"#,
    )
    .unwrap();
    let output = resmodes(&[
        "simulate",
        "--config",
        bad_config.to_str().unwrap(),
        "--out",
        dir.path().join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));

    let bad_trace = dir.path().join("bad.csv");
    fs::write(&bad_trace, "frequency_hz,magnitude\n2e8,1.0\n1e8,0.5\n3e8,1.0\n").unwrap();
    let output = resmodes(&["peaks", bad_trace.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 3"));
}

#[test]
fn missing_files_give_io_exit_code() {
    let output = resmodes(&[
        "simulate",
        "--config",
        "/nonexistent/config.json",
        "--out",
        "/tmp/never-written.json",
    ]);
    assert_eq!(output.status.code(), Some(5));
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let measurement = dir.path().join("m.json");
    let report = dir.path().join("r.json");
    let config = config_path("monomeric");
    resmodes(&[
        "simulate",
        "--config",
        &config,
        "--out",
        measurement.to_str().unwrap(),
    ]);
    resmodes(&[
        "recover",
        "--measurement",
        measurement.to_str().unwrap(),
        "--config",
        &config,
        "--out",
        report.to_str().unwrap(),
    ]);
    let svg_a = dir.path().join("a.svg");
    let svg_b = dir.path().join("b.svg");
    for svg in [&svg_a, &svg_b] {
        let output = resmodes(&[
            "plot",
            report.to_str().unwrap(),
            "--config",
            &config,
            "--out",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    let bytes = fs::read(&svg_a).unwrap();
    assert_eq!(bytes, fs::read(&svg_b).unwrap());
    assert!(bytes.starts_with(b"<svg"));
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn demo_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = resmodes(&["demo", "--out", out.to_str().unwrap(), "--seed", "11"]);
        assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
        let text = stdout_of(&output);
        assert!(text.contains("monomeric: PASS"));
        assert!(text.contains("dimeric: PASS"));
    }
    assert_eq!(dir_snapshot(&out_a), dir_snapshot(&out_b));
    for name in [
        "monomeric.measurement.json",
        "monomeric.report.json",
        "monomeric.svg",
        "dimeric.measurement.json",
        "dimeric.report.json",
        "dimeric.svg",
    ] {
        assert!(out_a.join(name).exists(), "missing {name}");
    }
}

#[test]
fn demo_with_noise_reports_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let output = resmodes(&[
        "demo",
        "--out",
        dir.path().join("noisy").to_str().unwrap(),
        "--noise",
        "1e-4",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout_of(&output));
    let text = stdout_of(&output);
    assert!(text.contains("completed with noise sigma"));
    assert!(text.contains("max error"));
}
