//! SVG trajectory plots over rate contours.

use std::fmt::Write as _;
use std::path::Path;

use super::trace::TraceRow;
use crate::error::Result;
use crate::world::{Position, Scenario};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;
const LATTICE: usize = 200;
const LEVELS: [f64; 9] = [0.02, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9];

/// Disk color for a remaining-buffer fraction: dark blue when empty, dark
/// red when full.
pub fn buffer_color(fraction: f64) -> String {
    let f = if fraction.is_finite() { fraction.clamp(0.0, 1.0) } else { 0.0 };
    let (empty, full) = ([0.0, 0.0, 139.0], [139.0, 0.0, 0.0]);
    let c: Vec<u8> = (0..3).map(|i| (empty[i] + f * (full[i] - empty[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn new(scenario: &Scenario) -> Self {
        let d = &scenario.domain;
        let scale = (SIZE - 2.0 * MARGIN) / d.width().max(d.height());
        Frame { x0: d.x[0], y0: d.y[0], scale }
    }

    fn map(&self, p: Position) -> (f64, f64) {
        (MARGIN + (p.x - self.x0) * self.scale, SIZE - MARGIN - (p.y - self.y0) * self.scale)
    }
}

/// Line segments of the level set `f = level` on a lattice of samples,
/// by marching squares. `values[j][i]` sits at `(xs[i], ys[j])`.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[Vec<f64>], level: f64) -> Vec<(Position, Position)> {
    let mut segs = Vec::new();
    let cross = |a: Position, b: Position, fa: f64, fb: f64| a.lerp(b, (level - fa) / (fb - fa));
    for j in 0..ys.len().saturating_sub(1) {
        for i in 0..xs.len().saturating_sub(1) {
            let corners = [
                (Position::new(xs[i], ys[j]), values[j][i]),
                (Position::new(xs[i + 1], ys[j]), values[j][i + 1]),
                (Position::new(xs[i + 1], ys[j + 1]), values[j + 1][i + 1]),
                (Position::new(xs[i], ys[j + 1]), values[j + 1][i]),
            ];
            let mut pts = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, fa) = corners[e];
                let (b, fb) = corners[(e + 1) % 4];
                if (fa >= level) != (fb >= level) {
                    pts.push(cross(a, b, fa, fb));
                }
            }
            // 2 crossings give one segment; 4 (saddle) give two
            for pair in pts.chunks_exact(2) {
                segs.push((pair[0], pair[1]));
            }
        }
    }
    segs
}

/// SVG document: rate contours, enlarged obstacles, one disk per visited
/// position colored by the remaining buffer, a `+` at the start and an `X`
/// on the goal when the scenario has one.
pub fn render_svg(scenario: &Scenario, rows: &[TraceRow]) -> String {
    let frame = Frame::new(scenario);
    let d = &scenario.domain;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let (ax, ay) = frame.map(Position::new(d.x[0], d.y[1]));
    let _ = writeln!(
        svg,
        r#"<rect x="{ax:.2}" y="{ay:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="black"/>"#,
        d.width() * frame.scale,
        d.height() * frame.scale
    );

    let xs: Vec<f64> = (0..LATTICE).map(|i| d.x[0] + d.width() * i as f64 / (LATTICE - 1) as f64).collect();
    let ys: Vec<f64> = (0..LATTICE).map(|j| d.y[0] + d.height() * j as f64 / (LATTICE - 1) as f64).collect();
    let values: Vec<Vec<f64>> =
        ys.iter().map(|&y| xs.iter().map(|&x| scenario.rate.expected_rate(Position::new(x, y))).collect()).collect();
    let peak = values.iter().flatten().copied().fold(0.0, f64::max);
    let _ = writeln!(svg, r##"<g class="contours" stroke="#888888" stroke-width="0.8" fill="none">"##);
    for frac in LEVELS {
        for (a, b) in marching_squares(&xs, &ys, &values, frac * peak) {
            let (x1, y1) = frame.map(a);
            let (x2, y2) = frame.map(b);
            let _ = writeln!(svg, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
        }
    }
    svg.push_str("</g>\n");

    let _ = writeln!(svg, r##"<g class="obstacles" fill="#bbbbbb" stroke="black">"##);
    for o in &scenario.obstacles {
        let (hx, hy) = o.half_extents();
        let (x, y) = frame.map(Position::new(o.center.x - hx, o.center.y + hy));
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}"/>"#,
            2.0 * hx * frame.scale,
            2.0 * hy * frame.scale
        );
    }
    svg.push_str("</g>\n");

    let full = rows.first().map_or(scenario.buffer_max, |r| r.buffer).max(f64::MIN_POSITIVE);
    let _ = writeln!(svg, r#"<g class="trajectory">"#);
    for r in rows {
        let (x, y) = frame.map(r.position);
        let color = buffer_color(r.buffer / full);
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#);
    }
    svg.push_str("</g>\n");

    if let Some(first) = rows.first() {
        let (x, y) = frame.map(first.position);
        let _ = writeln!(
            svg,
            r#"<path class="start" d="M {:.2} {y:.2} H {:.2} M {x:.2} {:.2} V {:.2}" stroke="black" stroke-width="2"/>"#,
            x - 8.0,
            x + 8.0,
            y - 8.0,
            y + 8.0
        );
    }
    if let Some(goal) = scenario.goal {
        let (x, y) = frame.map(goal);
        let _ = writeln!(
            svg,
            r#"<path class="goal" d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="red" stroke-width="3"/>"#,
            x - 8.0,
            y - 8.0,
            x + 8.0,
            y + 8.0,
            x - 8.0,
            y + 8.0,
            x + 8.0,
            y - 8.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes [`render_svg`] of the episode rows to `path`.
pub fn render_trajectory_plot(rows: &[TraceRow], scenario: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(scenario, rows))?;
    Ok(())
}
