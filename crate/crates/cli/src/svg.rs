//! Minimal SVG line plots of a trace.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::trace_csv::TraceRow;

/// Points kept per series; longer series are min/max decimated.
const MAX_BUCKETS: usize = 2000;
const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 48.0;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("trace has no samples")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub zero_line: bool,
}

/// Keeps the first, last, lowest and highest point of each bucket, in order.
pub fn decimate(points: &[(f64, f64)], buckets: usize) -> Vec<(f64, f64)> {
    if points.len() <= 2 * buckets.max(1) {
        return points.to_vec();
    }
    let size = points.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(4 * buckets);
    for chunk in points.chunks(size) {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in chunk.iter().enumerate() {
            if p.1 < chunk[lo].1 {
                lo = i;
            }
            if p.1 > chunk[hi].1 {
                hi = i;
            }
        }
        let mut keep = vec![0, lo, hi, chunk.len() - 1];
        keep.sort_unstable();
        keep.dedup();
        out.extend(keep.into_iter().map(|i| chunk[i]));
    }
    out
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{:.*}", decimals, v)
}

fn render_panel(svg: &mut String, panel: &Panel, ox: f64) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &panel.series {
        xs.extend(s.points.iter().map(|p| p.0));
        ys.extend(s.points.iter().map(|p| p.1));
    }
    if panel.zero_line {
        ys.push(0.0);
    }
    let (x0, x1) = bounds(xs.into_iter());
    let (y0, y1) = bounds(ys.into_iter());
    let (left, right) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
    let (top, bottom) = (MARGIN_T, PANEL_H - MARGIN_B);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        (left + right) / 2.0,
        PANEL_H - 8.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle" font-size="12">{}</text>"#,
        ox + 14.0,
        (top + bottom) / 2.0,
        escape(&panel.y_label)
    );

    let step = nice_step(x1 - x0);
    let mut v = (x0 / step).ceil() * step;
    while v <= x1 {
        let x = px(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{bottom:.1}" x2="{x:.1}" y2="{:.1}" stroke="#888"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"##,
            bottom + 4.0,
            bottom + 16.0,
            fmt_tick(v, step)
        );
        v += step;
    }
    let step = nice_step(y1 - y0);
    let mut v = (y0 / step).ceil() * step;
    while v <= y1 {
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="#888"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"##,
            left - 4.0,
            left - 6.0,
            y + 3.0,
            fmt_tick(v, step)
        );
        v += step;
    }
    if panel.zero_line {
        let y = py(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.1}" y1="{y:.1}" x2="{right:.1}" y2="{y:.1}" stroke="#c00" stroke-dasharray="4 3"/>"##
        );
    }

    for (i, s) in panel.series.iter().enumerate() {
        let mut d = String::new();
        for p in decimate(&s.points, MAX_BUCKETS) {
            if p.0.is_finite() && p.1.is_finite() {
                let _ = write!(d, "{:.2},{:.2} ", px(p.0), py(p.1));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1" points="{}"/>"#,
            s.color,
            d.trim_end()
        );
        let ly = top + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            left + 8.0,
            ly - 3.0,
            left + 24.0,
            ly - 3.0,
            s.color,
            left + 28.0,
            ly,
            escape(&s.name)
        );
    }
}

pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut svg, p, i as f64 * PANEL_W);
    }
    svg.push_str("</svg>\n");
    svg
}

fn trajectory_panels(rows: &[TraceRow]) -> [Panel; 2] {
    let make = |axis: usize, label: &str| {
        let series = vec![
            Series {
                name: "body".into(),
                color: "black",
                points: rows.iter().map(|r| (r.body[axis], r.body[2])).collect(),
            },
            Series {
                name: "leg 1".into(),
                color: "#1f77b4",
                points: rows
                    .iter()
                    .map(|r| (r.feet[0][axis], r.feet[0][2]))
                    .collect(),
            },
            Series {
                name: "leg 2".into(),
                color: "#d62728",
                points: rows
                    .iter()
                    .map(|r| (r.feet[1][axis], r.feet[1][2]))
                    .collect(),
            },
        ];
        Panel {
            title: format!("{label}-z"),
            x_label: format!("{label} (m)"),
            y_label: "z (m)".into(),
            series,
            zero_line: false,
        }
    };
    [make(0, "x"), make(1, "y")]
}

fn margin_panel(rows: &[TraceRow]) -> Panel {
    Panel {
        title: "stability margin".into(),
        x_label: "t (s)".into(),
        y_label: "margin (m)".into(),
        series: vec![Series {
            name: "margin".into(),
            color: "#2ca02c",
            points: rows.iter().map(|r| (r.t, r.margin)).collect(),
        }],
        zero_line: true,
    }
}

fn write_file(path: PathBuf, text: &str) -> Result<PathBuf, PlotError> {
    std::fs::write(&path, text).map_err(|source| PlotError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `<prefix>_trajectories.svg` and `<prefix>_margin.svg` into `dir`.
pub fn write_plots(rows: &[TraceRow], dir: &Path, prefix: &str) -> Result<[PathBuf; 2], PlotError> {
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let traj = render(&trajectory_panels(rows));
    let margin = render(&[margin_panel(rows)]);
    Ok([
        write_file(dir.join(format!("{prefix}_trajectories.svg")), &traj)?,
        write_file(dir.join(format!("{prefix}_margin.svg")), &margin)?,
    ])
}
