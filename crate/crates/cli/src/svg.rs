//! Deterministic SVG line charts. Each polyline carries its data in
//! `data-x`/`data-y` attributes at full precision, so a chart can be read
//! back into the points it was drawn from.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::table::format_real;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 6;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only, without connecting lines.
    pub markers_only: bool,
}

impl Series {
    pub fn line(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.to_string(),
            points,
            markers_only: false,
        }
    }

    pub fn markers(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.to_string(),
            points,
            markers_only: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

/// Axis interval in plotting coordinates (`log10` of the data on log axes).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Range {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Range {
    fn fit(values: &[f64], log: bool, axis: &str) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return invalid(format!("{axis}: non-finite value"));
        }
        if log && values.iter().any(|v| *v <= 0.0) {
            return invalid(format!("{axis}: non-positive value on a log axis"));
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let (lo, hi) = if lo == hi {
            // Flat data: +-5% around the value.
            let pad = if lo == 0.0 { 0.05 } else { 0.05 * lo.abs() };
            (lo - pad, hi + pad)
        } else if log {
            let span = hi.log10() - lo.log10();
            (10f64.powf(lo.log10() - 0.05 * span), 10f64.powf(hi.log10() + 0.05 * span))
        } else {
            let span = hi - lo;
            (lo - 0.05 * span, hi + 0.05 * span)
        };
        Ok(if log {
            Range { lo: lo.log10(), hi: hi.log10(), log }
        } else {
            Range { lo, hi, log }
        })
    }

    fn unit(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    fn tick_values(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64;
                if self.log {
                    10f64.powf(t)
                } else {
                    t
                }
            })
            .collect()
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render(chart: &Chart) -> Result<String> {
    if chart.series.iter().all(|s| s.points.is_empty()) {
        return invalid("chart has no data points");
    }
    let xs: Vec<f64> = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let xr = Range::fit(&xs, chart.log_x, "x")?;
    let yr = Range::fit(&ys, chart.log_y, "y")?;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xr.unit(x) * plot_w;
    let py = |y: f64| TOP + (1.0 - yr.unit(y)) * plot_h;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-log-x="{}" data-log-y="{}">"#,
        chart.log_x, chart.log_y
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="30" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for v in xr.tick_values() {
        let x = px(v);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 6.0,
            TOP + plot_h + 22.0,
            tick_label(v)
        );
    }
    for v in yr.tick_values() {
        let y = py(v);
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            LEFT - 9.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );

    for (i, series) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let data = |f: fn(&(f64, f64)) -> f64| {
            series.points.iter().map(|p| format_real(f(p))).collect::<Vec<_>>().join(" ")
        };
        let pixels = series
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect::<Vec<_>>()
            .join(" ");
        let stroke = if series.markers_only { "none" } else { color };
        let _ = writeln!(
            w,
            r#"<polyline class="series" data-name="{}" data-x="{}" data-y="{}" points="{pixels}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            escape(&series.name),
            data(|p| p.0),
            data(|p| p.1),
        );
        if series.markers_only || series.points.len() == 1 {
            for (x, y) in &series.points {
                let _ = writeln!(
                    w,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                    px(*x),
                    py(*y)
                );
            }
        }
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            w,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text></g>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
