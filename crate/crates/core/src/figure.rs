//! Static SVG rendering of a recovery report.
//!
//! Left panel: the measured spectra as vertical lines on a frequency axis,
//! full spectrum bold, single-deletion subspectra thin. Right panel: one
//! bar chart per mode with the recovered magnitudes, overlaying the model
//! magnitudes as outlines when provided. Output is a plain string built in
//! a fixed order with fixed-precision coordinates, so identical input
//! yields byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::eei::ModeMatrix;
use crate::error::{Error, Result};
use crate::model::lambda_to_freq;
use crate::pipeline::RecoveryReport;

const WIDTH: f64 = 960.0;
const TOP: f64 = 46.0;
const LEFT_X0: f64 = 50.0;
const LEFT_X1: f64 = 450.0;
const RIGHT_X0: f64 = 500.0;
const RIGHT_X1: f64 = 930.0;
const ROW_HEIGHT: f64 = 64.0;
const BOTTOM_PAD: f64 = 34.0;

/// Renders the report to an SVG string. `model_modes` adds outline bars for
/// side-by-side comparison with the recovered magnitudes.
pub fn figure_svg(report: &RecoveryReport, model_modes: Option<&ModeMatrix>) -> Result<String> {
    let n = report.modes.n();
    if let Some(model) = model_modes {
        if model.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: model.n(),
            });
        }
    }

    let full_freqs: Vec<f64> = report
        .lambda_full
        .values()
        .iter()
        .map(|&l| lambda_to_freq(l))
        .collect::<Result<_>>()?;
    let sub_freqs: Vec<Vec<f64>> = report
        .lambda_subs
        .by_deletion()
        .iter()
        .map(|s| s.values().iter().map(|&l| lambda_to_freq(l)).collect())
        .collect::<Result<_>>()?;

    let mut f_min = f64::INFINITY;
    let mut f_max = f64::NEG_INFINITY;
    for &f in full_freqs.iter().chain(sub_freqs.iter().flatten()) {
        f_min = f_min.min(f);
        f_max = f_max.max(f);
    }
    let span = (f_max - f_min).max(f_max * 1e-9).max(f64::MIN_POSITIVE);
    let pad = 0.04 * span;
    let (axis_lo, axis_hi) = (f_min - pad, f_max + pad);
    let x_of = |f: f64| LEFT_X0 + (f - axis_lo) / (axis_hi - axis_lo) * (LEFT_X1 - LEFT_X0);

    let panel_h = (n as f64 * ROW_HEIGHT).max(2.0 * ROW_HEIGHT);
    let height = TOP + panel_h + BOTTOM_PAD;
    let spec_y0 = TOP;
    let spec_y1 = TOP + panel_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\">spectrum and subspectra</text>",
        LEFT_X0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\">mode magnitudes</text>",
        RIGHT_X0
    );

    // Thin subspectrum lines first; the bold full-spectrum lines go on top.
    for freqs in &sub_freqs {
        for &f in freqs {
            let x = x_of(f);
            let _ = writeln!(
                svg,
                "<line class=\"sub\" x1=\"{x:.4}\" y1=\"{:.4}\" x2=\"{x:.4}\" y2=\"{:.4}\" stroke=\"#9a9a9a\" stroke-width=\"0.8\"/>",
                spec_y0 + 6.0,
                spec_y1 - 6.0
            );
        }
    }
    for &f in &full_freqs {
        let x = x_of(f);
        let _ = writeln!(
            svg,
            "<line class=\"full\" x1=\"{x:.4}\" y1=\"{spec_y0:.4}\" x2=\"{x:.4}\" y2=\"{spec_y1:.4}\" stroke=\"#000000\" stroke-width=\"2.5\"/>"
        );
    }

    // Frequency axis.
    let _ = writeln!(
        svg,
        "<line x1=\"{LEFT_X0:.4}\" y1=\"{spec_y1:.4}\" x2=\"{LEFT_X1:.4}\" y2=\"{spec_y1:.4}\" stroke=\"#000000\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{LEFT_X0:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"12\" fill=\"#000000\">{:.2} MHz</text>",
        spec_y1 + 18.0,
        axis_lo / 1e6
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"12\" fill=\"#000000\" text-anchor=\"end\">{:.2} MHz</text>",
        LEFT_X1,
        spec_y1 + 18.0,
        axis_hi / 1e6
    );

    // One bar-chart row per mode.
    let chart_w = RIGHT_X1 - RIGHT_X0;
    let slot = chart_w / n.max(1) as f64;
    let bar_w = 0.45 * slot;
    let bar_h_max = ROW_HEIGHT - 18.0;
    for mode in 0..n {
        let base_y = TOP + (mode as f64 + 1.0) * ROW_HEIGHT - 10.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{RIGHT_X0:.4}\" y1=\"{base_y:.4}\" x2=\"{RIGHT_X1:.4}\" y2=\"{base_y:.4}\" stroke=\"#cccccc\" stroke-width=\"0.8\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"11\" fill=\"#000000\" text-anchor=\"end\">mode {}</text>",
            RIGHT_X0 - 8.0,
            base_y - 2.0,
            mode + 1
        );
        for j in 0..n {
            let cx = RIGHT_X0 + (j as f64 + 0.5) * slot;
            let rec = report.modes.get(mode, j).min(1.0);
            let rec_h = rec * bar_h_max;
            let _ = writeln!(
                svg,
                "<rect class=\"bar-recovered\" x=\"{:.4}\" y=\"{:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"#c0392b\" fill-opacity=\"0.85\"/>",
                cx - bar_w / 2.0,
                base_y - rec_h,
                bar_w,
                rec_h
            );
            if let Some(model) = model_modes {
                let mv = model.get(mode, j).min(1.0);
                let mh = mv * bar_h_max;
                let _ = writeln!(
                    svg,
                    "<rect class=\"bar-model\" x=\"{:.4}\" y=\"{:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>",
                    cx - bar_w / 2.0 - 2.0,
                    base_y - mh,
                    bar_w + 4.0,
                    mh
                );
            }
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes [`figure_svg`] output to a file.
pub fn render_figure(
    report: &RecoveryReport,
    model_modes: Option<&ModeMatrix>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let svg = figure_svg(report, model_modes)?;
    fs::write(path, svg)?;
    Ok(())
}
