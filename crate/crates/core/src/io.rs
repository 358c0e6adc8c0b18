//! Serialization of result tables and a small SVG line-plot writer.
//!
//! Everything is rendered to bytes first so that callers can decide to write
//! nothing at all when a later step fails.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::SCHEMA_VERSION;
use crate::error::Result;

/// CSV with a header row taken from the field names of `T`.
pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .into_inner()
        .map_err(|e| crate::Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON object with a top-level `schema_version`; `body` must
/// serialize to an object.
pub fn json_bytes<T: Serialize>(body: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub struct Series<'a> {
    pub label: &'a str,
    pub y: &'a [f64],
    pub color: &'a str,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// Line plot of one or more series against a common abscissa, with axes,
/// tick labels and a legend.
pub fn svg_line_plot(title: &str, x_label: &str, x: &[f64], series: &[Series<'_>]) -> String {
    let (x_min, x_max) = bounds(x.iter().copied());
    let (_, mut y_max) = bounds(series.iter().flat_map(|s| s.y.iter().copied()));
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let y_min = 0.0;
    let px = |v: f64| {
        MARGIN + (v - x_min) / (x_max - x_min).max(f64::MIN_POSITIVE) * (WIDTH - 2.0 * MARGIN)
    };
    let py = |v: f64| HEIGHT - MARGIN - (v - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right, bottom, top) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.1},{top:.1} L{left:.1},{bottom:.1} L{right:.1},{bottom:.1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let xv = x_min + (x_max - x_min) * k as f64 / 4.0;
        let yv = y_min + (y_max - y_min) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(xv),
            bottom + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    for (k, s) in series.iter().enumerate() {
        let mut points = String::new();
        for (xv, yv) in x.iter().zip(s.y) {
            let _ = write!(points, "{:.2},{:.2} ", px(*xv), py(*yv));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.trim_end(),
            s.color
        );
        let ly = top + 16.0 * (k as f64 + 1.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/>"#,
            right - 90.0,
            right - 70.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            right - 64.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
