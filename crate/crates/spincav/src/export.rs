//! Deterministic CSV and SVG exports.
//!
//! CSV is the interface of record: UTF-8, '.' decimal separator, every row
//! newline-terminated, shortest-round-trip float formatting.  Identical
//! inputs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::inout::{FieldSweep, ShiftEntry, TransmissionTrace};

/// Render per-state transmission traces: columns
/// `omega_ghz, re_t, im_t, abs_t, phase_rad, state_index`.
pub fn trace_csv(traces: &[(usize, &TransmissionTrace)]) -> String {
    let mut out = String::from("omega_ghz,re_t,im_t,abs_t,phase_rad,state_index\n");
    for (state, trace) in traces {
        for i in 0..trace.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                trace.omega_ghz[i],
                trace.t[i].re,
                trace.t[i].im,
                trace.abs_t[i],
                trace.phase_rad[i],
                state
            );
        }
    }
    out
}

/// Render a shift table: columns `state_index, re_shift_ghz, im_shift_ghz`.
pub fn shift_csv(shifts: &[ShiftEntry]) -> String {
    let mut out = String::from("state_index,re_shift_ghz,im_shift_ghz\n");
    for s in shifts {
        let _ = writeln!(out, "{},{},{}", s.state, s.value.re, s.value.im);
    }
    out
}

/// Render a fixed-frequency field sweep: columns
/// `b_t, re_t, im_t, abs_t, state_index` (state -1 for a fixed preparation).
pub fn sweep_csv(sweep: &FieldSweep) -> String {
    let mut out = String::from("b_t,re_t,im_t,abs_t,state_index\n");
    for (curve, state) in sweep.curves.iter().zip(&sweep.states) {
        let label = state.map(|s| s as i64).unwrap_or(-1);
        for (i, t) in curve.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", sweep.b_t[i], t.re, t.im, t.norm(), label);
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Fixed color palette for SVG line plots.
const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Minimal self-contained SVG line plot of one series per curve.
pub fn line_plot_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    curves: &[(String, &[f64], &[f64])],
) -> String {
    let width = 860.0;
    let height = 520.0;
    let ml = 80.0;
    let mr = 20.0;
    let mt = 40.0;
    let mb = 60.0;
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (_, xs, ys) in curves {
        for &x in *xs {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
        }
        for &y in *ys {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmax <= xmin {
        xmin = 0.0;
        xmax = 1.0;
    }
    if !ymin.is_finite() || ymax <= ymin {
        ymin = 0.0;
        ymax = 1.0;
    }
    let pad = 0.05 * (ymax - ymin);
    let (ymin, ymax) = (ymin - pad, ymax + pad);

    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        ml + pw / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        ml + pw / 2.0,
        height - 16.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        mt + ph / 2.0,
        mt + ph / 2.0,
        xml_escape(y_label)
    );
    // axis tick labels at the corners
    let _ = writeln!(
        svg,
        "<text x=\"{ml}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{xmin:.6}</text>",
        height - 40.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{xmax:.6}</text>",
        ml + pw,
        height - 40.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{ymax:.4}</text>",
        ml - 6.0,
        mt + 10.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{ymin:.4}</text>",
        ml - 6.0,
        mt + ph
    );

    for (idx, (label, xs, ys)) in curves.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in xs.iter().zip(ys.iter()) {
            let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        );
        let ly = mt + 16.0 + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ml + 8.0,
            ml + 28.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            ml + 34.0,
            ly + 4.0,
            xml_escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
