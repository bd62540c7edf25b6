//! Plain SVG renderings of a report: the confidence curve and the
//! flip-percentage histogram. Output text depends only on the report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::LufReport;

const W: f64 = 480.0;
const H: f64 = 320.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 52.0;

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + (W - LEFT - RIGHT) * if self.x_max > 0.0 { v / self.x_max } else { 0.0 }
    }

    fn y(&self, v: f64) -> f64 {
        H - BOTTOM - (H - TOP - BOTTOM) * if self.y_max > 0.0 { v / self.y_max } else { 0.0 }
    }

    fn open(&self, svg: &mut String, x_label: &str, y_label: &str, x_ticks: &[f64], y_ticks: &[f64]) {
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let (x0, y0) = (self.x(0.0), self.y(0.0));
        let _ = writeln!(
            svg,
            r#"<path d="M{x0:.2} {:.2} L{x0:.2} {y0:.2} L{:.2} {y0:.2}" stroke="black" fill="none"/>"#,
            TOP,
            W - RIGHT
        );
        for &t in x_ticks {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                self.x(t),
                y0 + 14.0,
                tick(t)
            );
        }
        for &t in y_ticks {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                self.y(t) + 4.0,
                tick(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
            LEFT + (W - LEFT - RIGHT) / 2.0,
            H - 12.0
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{y_label}</text>"#,
            TOP + (H - TOP - BOTTOM) / 2.0
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn ticks(max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| max * i as f64 / n as f64).collect()
}

/// Expected LUF (percent) against the confidence threshold.
pub fn confidence_curve_svg(report: &LufReport) -> String {
    let pts: Vec<(f64, f64)> = report
        .confidence_curve
        .iter()
        .filter_map(|c| c.expected_luf.map(|v| (c.threshold, 100.0 * v)))
        .collect();
    let x_max = report.confidence_curve.last().map_or(0.4, |c| c.threshold).max(0.1);
    let frame = Frame { x_max, y_max: 100.0 };
    let mut svg = String::new();
    frame.open(
        &mut svg,
        "Prediction confidence",
        "Points with changed prediction (%)",
        &report.confidence_curve.iter().map(|c| c.threshold).collect::<Vec<_>>(),
        &ticks(100.0, 4),
    );
    if !pts.is_empty() {
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { 'M' } else { 'L' }, frame.x(x), frame.y(y)))
            .collect();
        let _ = writeln!(svg, r##"<path d="{}" stroke="#1f77b4" stroke-width="2" fill="none"/>"##, d.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/>"##, frame.x(x), frame.y(y));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Number of variants against the percentage of points each one flips.
pub fn flip_histogram_svg(report: &LufReport) -> String {
    let bins = &report.flip_histogram;
    let x_max = 100.0 * bins.last().map_or(0.0, |b| b.upper);
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let y_max = bins.iter().map(|b| b.count).max().unwrap_or(0).max(1) as f64;
    let frame = Frame { x_max, y_max };
    let mut svg = String::new();
    let y_label = match report.metadata.variant_label.as_str() {
        "seed" => "Number of seeds",
        "rule-index" => "Number of rules",
        _ => "Number of left-out points",
    };
    frame.open(
        &mut svg,
        "Points with changed prediction (%)",
        y_label,
        &ticks(x_max, 5),
        &ticks(y_max, y_max.min(5.0) as usize),
    );
    let all_zero = bins.last().is_none_or(|b| b.upper == 0.0);
    for b in bins {
        if b.count == 0 {
            continue;
        }
        // with every fraction at 0 there is a single bar at the origin
        let (lo, hi) = if all_zero {
            (0.0, x_max / 10.0)
        } else {
            (100.0 * b.lower, 100.0 * b.upper)
        };
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#ff7f0e" stroke="white"/>"##,
            frame.x(lo),
            frame.y(b.count as f64),
            frame.x(hi) - frame.x(lo),
            frame.y(0.0) - frame.y(b.count as f64)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `confidence_curve.svg` and `flip_histogram.svg`. An empty report
/// writes nothing.
pub fn emit_plots(report: &LufReport, output_dir: &Path) -> Result<Vec<PathBuf>> {
    if report.estimates.is_empty() {
        log::warn!("report has no points; skipping plots");
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut out = Vec::new();
    for (name, svg) in [
        ("confidence_curve.svg", confidence_curve_svg(report)),
        ("flip_histogram.svg", flip_histogram_svg(report)),
    ] {
        let path = output_dir.join(name);
        std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}
