//! File ingestion and emission.
//!
//! Three JSON schemas (array configuration, measurement set, recovery
//! report) and one CSV format (raw trace). Parsing is strict: unknown JSON
//! keys and malformed CSV rows are errors that name the offending key or
//! line, never silently skipped.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eei::{ModeMatrix, Spectrum, SubspectraSet};
use crate::error::{Error, Result};
use crate::model::ArrayConfig;
use crate::peaks::Trace;
use crate::pipeline::{MeasurementSet, RecoveryReport};

pub const TRACE_HEADER: &str = "frequency_hz,magnitude";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: usize,
    inductance_h: f64,
    base_frequencies_hz: Vec<f64>,
    coupling_coefficients: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementFile {
    label: String,
    full_peaks_hz: Vec<f64>,
    sub_peaks_hz: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    lambda_full: Vec<f64>,
    lambda_subs: Vec<Vec<f64>>,
    modes: Vec<Vec<f64>>,
    repair_deltas: Vec<Vec<f64>>,
    symmetrization_deltas: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

fn json_error(err: serde_json::Error) -> Error {
    Error::Parse {
        line: err.line(),
        message: err.to_string(),
    }
}

/// Parses an [`ArrayConfig`] from its JSON schema. The explicit `n` must
/// agree with the base-frequency count.
pub fn config_from_json(text: &str) -> Result<ArrayConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(json_error)?;
    if file.n != file.base_frequencies_hz.len() {
        return Err(Error::Schema {
            key: "n".into(),
            message: format!(
                "n = {} does not match {} base frequencies",
                file.n,
                file.base_frequencies_hz.len()
            ),
        });
    }
    ArrayConfig::new(
        file.inductance_h,
        file.base_frequencies_hz,
        file.coupling_coefficients,
    )
}

pub fn config_to_json(cfg: &ArrayConfig) -> String {
    let file = ConfigFile {
        n: cfg.n(),
        inductance_h: cfg.inductance_h(),
        base_frequencies_hz: cfg.base_frequencies_hz().to_vec(),
        coupling_coefficients: cfg.coupling_coefficients().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("config serialization cannot fail")
}

pub fn read_config(path: impl AsRef<Path>) -> Result<ArrayConfig> {
    config_from_json(&fs::read_to_string(path)?)
}

pub fn measurement_from_json(text: &str) -> Result<MeasurementSet> {
    let file: MeasurementFile = serde_json::from_str(text).map_err(json_error)?;
    MeasurementSet::new(file.label, file.full_peaks_hz, file.sub_peaks_hz)
}

pub fn measurement_to_json(ms: &MeasurementSet) -> String {
    let file = MeasurementFile {
        label: ms.label().to_string(),
        full_peaks_hz: ms.full_peaks_hz().to_vec(),
        sub_peaks_hz: ms.sub_peaks_hz().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("measurement serialization cannot fail")
}

pub fn read_measurement(path: impl AsRef<Path>) -> Result<MeasurementSet> {
    measurement_from_json(&fs::read_to_string(path)?)
}

pub fn write_measurement(ms: &MeasurementSet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, measurement_to_json(ms) + "\n")?;
    Ok(())
}

pub fn report_to_json(report: &RecoveryReport) -> String {
    let file = ReportFile {
        lambda_full: report.lambda_full.values().to_vec(),
        lambda_subs: report
            .lambda_subs
            .by_deletion()
            .iter()
            .map(|s| s.values().to_vec())
            .collect(),
        modes: report.modes.rows().map(|r| r.to_vec()).collect(),
        repair_deltas: report.repair_deltas.clone(),
        symmetrization_deltas: report.symmetrization_deltas.clone(),
        warnings: report.warnings.clone(),
    };
    serde_json::to_string_pretty(&file).expect("report serialization cannot fail")
}

pub fn report_from_json(text: &str) -> Result<RecoveryReport> {
    let file: ReportFile = serde_json::from_str(text).map_err(json_error)?;
    let n = file.lambda_full.len();
    let lambda_full = Spectrum::new(file.lambda_full)?;
    let lambda_subs = SubspectraSet::new(
        file.lambda_subs
            .into_iter()
            .map(Spectrum::new)
            .collect::<Result<_>>()?,
    )?;
    if file.modes.len() != n {
        return Err(Error::Schema {
            key: "modes".into(),
            message: format!("expected {} mode rows, got {}", n, file.modes.len()),
        });
    }
    let mut magnitudes = Vec::with_capacity(n * n);
    for row in &file.modes {
        if row.len() != n {
            return Err(Error::Schema {
                key: "modes".into(),
                message: format!("expected {} components per mode, got {}", n, row.len()),
            });
        }
        magnitudes.extend_from_slice(row);
    }
    Ok(RecoveryReport {
        modes: ModeMatrix::new(n, magnitudes)?,
        lambda_full,
        lambda_subs,
        repair_deltas: file.repair_deltas,
        symmetrization_deltas: file.symmetrization_deltas,
        warnings: file.warnings,
    })
}

pub fn write_report(report: &RecoveryReport, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, report_to_json(report) + "\n")?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<RecoveryReport> {
    report_from_json(&fs::read_to_string(path)?)
}

/// Parses a trace from CSV text. Requires the exact header
/// `frequency_hz,magnitude`; `#` starts a comment line; frequencies must be
/// strictly increasing. Errors carry 1-based line numbers.
pub fn trace_from_csv(text: &str) -> Result<Trace> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != TRACE_HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header '{TRACE_HEADER}', got '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let mut fields = line.split(',');
        let (f_str, m_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(f), Some(m), None) => (f.trim(), m.trim()),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly two comma-separated fields".into(),
                });
            }
        };
        let f: f64 = f_str.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid frequency '{f_str}'"),
        })?;
        let m: f64 = m_str.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid magnitude '{m_str}'"),
        })?;
        if !f.is_finite() || !m.is_finite() || m < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: "frequency must be finite and magnitude finite and nonnegative".into(),
            });
        }
        if let Some(&(prev, _)) = points.last() {
            if f <= prev {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("frequency {f} is not greater than previous {prev}"),
                });
            }
        }
        points.push((f, m));
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing header '{TRACE_HEADER}'"),
        });
    }
    Trace::new(points)
}

pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for &(f, m) in trace.points() {
        out.push_str(&format!("{f:e},{m:e}\n"));
    }
    out
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Trace> {
    trace_from_csv(&fs::read_to_string(path)?)
}
