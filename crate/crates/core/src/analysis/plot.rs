//! Minimal deterministic SVG charts: resistance against strain per window, and
//! gauge factor / unstrained resistance against break-in strain.

use std::fmt::Write;

use super::{channel_resistance, row_orientations, strain_from_deflection, AnalysisReport, BreakinCurve};
use crate::experiment::TimeSeriesRecord;
use crate::mechanics::{Gauge, Orientation};
use crate::model::BeamGeometry;
use crate::sensing::DividerConfig;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const MAX_POINTS: usize = 400;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Joined with a polyline (else drawn as dots).
    pub line: bool,
}

struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn bounds(series: &[Series]) -> Option<(f64, f64, f64, f64)> {
    let mut it = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let first = it.next()?;
    let (mut x0, mut x1, mut y0, mut y1) = (first.0, first.0, first.1, first.1);
    for p in it {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    let pad = |lo: f64, hi: f64| {
        if hi > lo {
            let d = 0.05 * (hi - lo);
            (lo - d, hi + d)
        } else {
            let d = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            (lo - d, hi + d)
        }
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    Some((x0, x1, y0, y1))
}

fn panel(out: &mut String, f: &Frame, title: &str, xlabel: &str, ylabel: &str, series: &[Series]) {
    let (l, r, t, b) = (f.x + 70.0, f.x + f.w - 15.0, f.y + 30.0, f.y + f.h - 45.0);
    let _ = writeln!(
        out,
        r##"<rect x="{l:.1}" y="{t:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        r - l,
        b - t
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        (l + r) / 2.0,
        f.y + 18.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        (l + r) / 2.0,
        f.y + f.h - 8.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        f.x + 14.0,
        (t + b) / 2.0,
        f.x + 14.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
    let Some((x0, x1, y0, y1)) = bounds(series) else {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">no data</text>"#,
            (l + r) / 2.0,
            (t + b) / 2.0
        );
        return;
    };
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * (r - l);
    let sy = |y: f64| b - (y - y0) / (y1 - y0) * (b - t);
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            sx(fx),
            b + 14.0,
            tick_label(fx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"#,
            l - 4.0,
            sy(fy) + 3.0,
            tick_label(fy)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let step = s.points.len().div_ceil(MAX_POINTS).max(1);
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .step_by(step)
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| (sx(x), sy(y)))
            .collect();
        if s.line {
            let mut d = String::new();
            for (x, y) in &pts {
                let _ = write!(d, "{x:.2},{y:.2} ");
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                d.trim_end()
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.6" fill="{color}"/>"#);
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{color}">{}</text>"#,
            r - 150.0,
            t + 14.0 + 12.0 * i as f64,
            escape(&s.label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn orientation_name(o: Option<Orientation>) -> &'static str {
    match o {
        Some(Orientation::Initial) => "initial",
        Some(Orientation::Flipped) => "flipped",
        None => "unknown",
    }
}

fn curve_series(curves: &[BreakinCurve], value: impl Fn(&super::BreakinPoint) -> f64) -> Vec<Series> {
    curves
        .iter()
        .map(|c| Series {
            label: format!("gauge {} ({})", c.gauge.index() + 1, orientation_name(c.orientation)),
            points: c.points.iter().map(|p| (p.max_breakin_strain, value(p))).collect(),
            line: true,
        })
        .collect()
}

/// Four panels: R against ε̄ for every window of each gauge, then gauge factor
/// and unstrained resistance against break-in strain.
pub fn report_svg(
    record: &TimeSeriesRecord,
    report: &AnalysisReport,
    geometry: &BeamGeometry,
    divider: &DividerConfig,
) -> String {
    let orientations = row_orientations(record).unwrap_or_else(|| vec![Orientation::Initial; record.len()]);
    let deflection = record.deflection();
    let mut body = String::new();
    let (pw, ph) = (480.0, 340.0);
    for gauge in Gauge::BOTH {
        let r = channel_resistance(record, gauge, divider);
        let strain = strain_from_deflection(&deflection, geometry, &orientations, gauge);
        let series: Vec<Series> = report
            .windows
            .iter()
            .map(|w| Series {
                label: format!(
                    "window {} k={}",
                    w.id,
                    w.channels[gauge.index()]
                        .fit
                        .map(|f| format!("{:.2}", f.k))
                        .unwrap_or_else(|| "-".into())
                ),
                points: (w.start_row..w.end_row).map(|i| (strain[i], r[i])).collect(),
                line: false,
            })
            .collect();
        let frame = Frame {
            x: pw * gauge.index() as f64,
            y: 0.0,
            w: pw,
            h: ph,
        };
        panel(
            &mut body,
            &frame,
            &format!("Gauge {}: resistance vs strain", gauge.index() + 1),
            "average strain",
            "resistance (ohm)",
            &series,
        );
    }
    let k = curve_series(&report.curves, |p| p.k);
    let ru = curve_series(&report.curves, |p| p.r_unstrained);
    panel(
        &mut body,
        &Frame { x: 0.0, y: ph, w: pw, h: ph },
        "Gauge factor vs break-in strain",
        "maximum break-in strain",
        "gauge factor",
        &k,
    );
    panel(
        &mut body,
        &Frame { x: pw, y: ph, w: pw, h: ph },
        "Unstrained resistance vs break-in strain",
        "maximum break-in strain",
        "resistance (ohm)",
        &ru,
    );
    document(2.0 * pw, 2.0 * ph, &body)
}

/// Single chart of arbitrary series, for ad-hoc use.
pub fn chart_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut body = String::new();
    panel(
        &mut body,
        &Frame { x: 0.0, y: 0.0, w: 640.0, h: 420.0 },
        title,
        xlabel,
        ylabel,
        series,
    );
    document(640.0, 420.0, &body)
}
