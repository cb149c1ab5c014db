//! Per-depth convergence tables and log-log plots.

use std::fmt::Write;

use serde::Serialize;

use crate::quasinorm::NormResult;

pub const CSV_HEADER: &str = "depth,distance,p_power,err_bound,analytic_bound";

/// One probed depth: a measured quasi-distance and the bound the
/// construction promises for it, both as quasi-norm values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub depth: usize,
    pub distance: f64,
    pub p_power: f64,
    pub err_bound: f64,
    pub analytic_bound: f64,
}

impl ConvergenceRow {
    pub fn new(depth: usize, measured: NormResult, analytic_bound: f64) -> Self {
        ConvergenceRow {
            depth,
            distance: measured.value,
            p_power: measured.p_power,
            err_bound: measured.err_bound,
            analytic_bound,
        }
    }

    pub fn within_bound(&self) -> bool {
        self.distance <= self.analytic_bound
    }
}

/// A named column of rows, e.g. the `L^p` part and the derivative part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub rows: Vec<ConvergenceRow>,
}

impl Series {
    pub fn new(name: impl Into<String>, rows: Vec<ConvergenceRow>) -> Self {
        Series {
            name: name.into(),
            rows,
        }
    }

    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(ConvergenceRow::within_bound)
    }

    /// Strictly decreasing `p`-powers, up to the quadrature error bounds.
    pub fn decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].p_power <= w[0].p_power + w[0].err_bound + w[1].err_bound)
    }

    pub fn last_distance(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.distance)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e}",
                r.depth, r.distance, r.p_power, r.err_bound, r.analytic_bound
            )
            .expect("write to string");
        }
        out
    }
}

/// Parses a table written by [`Series::to_csv`].
pub fn parse_csv(text: &str) -> Option<Vec<ConvergenceRow>> {
    let mut lines = text.lines();
    if lines.next()? != CSV_HEADER {
        return None;
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return None;
            }
            Some(ConvergenceRow {
                depth: f[0].parse().ok()?,
                distance: f[1].parse().ok()?,
                p_power: f[2].parse().ok()?,
                err_bound: f[3].parse().ok()?,
                analytic_bound: f[4].parse().ok()?,
            })
        })
        .collect()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Legend label, dashed flag and log-log points of one polyline.
type Polyline = (String, bool, Vec<(f64, f64)>);

/// SVG 1.1 log-log plot of distance and analytic bound against depth, one
/// solid (measured) and one dashed (bound) polyline per series.
pub fn loglog_svg(title: &str, series: &[Series]) -> String {
    let mut lines: Vec<Polyline> = Vec::new();
    for s in series {
        let pick = |f: fn(&ConvergenceRow) -> f64| -> Vec<(f64, f64)> {
            s.rows
                .iter()
                .filter(|r| r.depth > 0 && f(r) > 0.0 && f(r).is_finite())
                .map(|r| ((r.depth as f64).log10(), f(r).log10()))
                .collect()
        };
        lines.push((format!("{} distance", s.name), false, pick(|r| r.distance)));
        lines.push((
            format!("{} bound", s.name),
            true,
            pick(|r| r.analytic_bound),
        ));
    }
    let pts = lines.iter().flat_map(|l| l.2.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .expect("write to string");
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(
        svg,
        r#"<polyline points="{left},{top} {left},{bottom} {right},{bottom}" fill="none" stroke="black"/>"#
    )
    .expect("write to string");
    for e in x0 as i32..=x1 as i32 {
        let x = sx(e as f64);
        writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        )
        .expect("write to string");
    }
    for e in y0 as i32..=y1 as i32 {
        let y = sy(e as f64);
        writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            left - 5.0,
            left - 8.0,
            y + 4.0
        )
        .expect("write to string");
    }
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">depth</text>
<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">quasi-distance</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .expect("write to string");
    for (i, (label, dashed, pts)) in lines.iter().enumerate() {
        let color = COLORS[(i / 2) % COLORS.len()];
        let dash = if *dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                coords.join(" ")
            )
            .expect("write to string");
        }
        let ly = top + 16.0 * i as f64;
        writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            right - 150.0,
            right - 126.0,
            right - 120.0,
            ly + 4.0,
            escape(label)
        )
        .expect("write to string");
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
