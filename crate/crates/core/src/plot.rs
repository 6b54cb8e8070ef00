//! Deterministic SVG charts: convergence curves, dimension profiles and
//! 2-D/3-D scatter plots. Coordinates are printed with fixed precision and
//! nothing depends on time or locale, so identical inputs give identical
//! bytes.

use std::fmt::Write as _;

use crate::error::{HsapError, Result};
use crate::hsap::{SweepPoint, TraceRecord};
use crate::linalg::Matrix;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
/// Orthographic camera for 3-D scatters, in degrees.
const AZIMUTH: f64 = 35.0;
const ELEVATION: f64 = 25.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        Self {
            x: padded(xs),
            y: padded(ys),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn padded(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{l:.1}" y="{t:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = frame.x.0 + f * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + f * (frame.y.1 - frame.y.0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{xp:.2}" y1="{b:.1}" x2="{xp:.2}" y2="{:.1}" stroke="black"/><text x="{xp:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            b + 5.0,
            b + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{yp:.2}" x2="{l:.1}" y2="{yp:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 5.0,
            l - 8.0,
            yp + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Polyline through `(xs[i], ys[i])` with a marker at every point.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
) -> Result<String> {
    if xs.is_empty() {
        return Err(HsapError::EmptyInput("nothing to plot".into()));
    }
    if xs.len() != ys.len() {
        return Err(HsapError::DimensionMismatch(format!(
            "{} x values and {} y values",
            xs.len(),
            ys.len()
        )));
    }
    let frame = Frame::fit(xs.iter().copied(), ys.iter().copied());
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, x_label, y_label);
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        PALETTE[0],
        points.join(" ")
    );
    for (&x, &y) in xs.iter().zip(ys) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#,
            frame.px(x),
            frame.py(y),
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Objective against iteration.
pub fn convergence_svg(trace: &[TraceRecord]) -> Result<String> {
    if trace.is_empty() {
        return Err(HsapError::EmptyInput("trace is empty".into()));
    }
    let xs: Vec<f64> = trace.iter().map(|r| r.iteration as f64).collect();
    let ys: Vec<f64> = trace.iter().map(|r| r.objective).collect();
    line_chart(
        "Convergence",
        "iteration",
        "smallest candidate value",
        &xs,
        &ys,
    )
}

/// Final objective against target dimension.
pub fn profile_svg(profile: &[SweepPoint]) -> Result<String> {
    let xs: Vec<f64> = profile.iter().map(|p| p.k as f64).collect();
    let ys: Vec<f64> = profile.iter().map(|p| p.final_objective).collect();
    line_chart(
        "Dimension profile",
        "target dimension k",
        "final objective",
        &xs,
        &ys,
    )
}

/// Scatter of 2-column points, or of 3-column points seen through a fixed
/// orthographic camera. Points are colored by label when labels are given.
pub fn scatter_svg(points: &Matrix, labels: Option<&[i64]>) -> Result<String> {
    let (t, cols) = points.shape();
    if t == 0 {
        return Err(HsapError::EmptyInput("no points to plot".into()));
    }
    if let Some(l) = labels {
        if l.len() != t {
            return Err(HsapError::DimensionMismatch(format!(
                "{} labels for {t} points",
                l.len()
            )));
        }
    }
    let planar: Vec<(f64, f64)> = match cols {
        2 => (0..t)
            .map(|i| (points.get(i, 0), points.get(i, 1)))
            .collect(),
        3 => {
            let (az, el) = (AZIMUTH.to_radians(), ELEVATION.to_radians());
            (0..t)
                .map(|i| {
                    let r = points.row(i);
                    let x = r[0] * az.cos() - r[1] * az.sin();
                    let depth = r[0] * az.sin() + r[1] * az.cos();
                    let y = r[2] * el.cos() - depth * el.sin();
                    (x, y)
                })
                .collect()
        }
        other => {
            return Err(HsapError::DimensionMismatch(format!(
                "scatter plots need 2 or 3 columns, got {other}"
            )))
        }
    };
    let mut classes: Vec<i64> = labels.map(<[i64]>::to_vec).unwrap_or_default();
    classes.sort_unstable();
    classes.dedup();

    let frame = Frame::fit(planar.iter().map(|p| p.0), planar.iter().map(|p| p.1));
    let mut out = String::new();
    let title = if cols == 3 {
        "Projected points (3-D view)"
    } else {
        "Projected points"
    };
    header(&mut out, title);
    axes(
        &mut out,
        &frame,
        if cols == 3 { "view x" } else { "x1" },
        if cols == 3 { "view y" } else { "x2" },
    );
    for (i, &(x, y)) in planar.iter().enumerate() {
        let color = match labels {
            Some(l) => {
                PALETTE[classes.binary_search(&l[i]).expect("label present") % PALETTE.len()]
            }
            None => PALETTE[0],
        };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}" fill-opacity="0.8"/>"#,
            frame.px(x),
            frame.py(y)
        );
    }
    for (idx, c) in classes.iter().enumerate() {
        let y = MARGIN + 14.0 * idx as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{:.1}" cy="{y:.1}" r="4" fill="{}"/><text x="{:.1}" y="{:.1}">{c}</text>"#,
            WIDTH - MARGIN + 12.0,
            PALETTE[idx % PALETTE.len()],
            WIDTH - MARGIN + 20.0,
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
