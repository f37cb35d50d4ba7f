//! Minimal deterministic SVG line plots.

use std::fmt::Write;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("nothing to plot")]
    EmptySeries,
    #[error("series '{0}' needs at least two points")]
    TooFewPoints(String),
    #[error("series '{0}' has non-finite values")]
    NonFinite(String),
    #[error("series '{0}' has non-positive values on a log axis")]
    NonPositiveOnLogAxis(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesStyle {
    #[default]
    Line,
    Dashed,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: SeriesStyle) -> Self {
        Self {
            label: label.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotMeta {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: AxisScale,
    pub y_scale: AxisScale,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotMeta {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_scale: AxisScale::Linear,
            y_scale: AxisScale::Linear,
            width: 640,
            height: 420,
        }
    }
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

struct Axis {
    scale: AxisScale,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: AxisScale) -> Self {
        let (mut lo, mut hi) = values
            .map(|v| {
                if scale == AxisScale::Log {
                    v.log10()
                } else {
                    v
                }
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        } else if scale == AxisScale::Linear {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self { scale, lo, hi }
    }

    fn unit(&self, v: f64) -> f64 {
        let t = if self.scale == AxisScale::Log {
            v.log10()
        } else {
            v
        };
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            AxisScale::Log => {
                let first = self.lo.ceil() as i32;
                let last = self.hi.floor() as i32;
                let step = ((last - first) / 6 + 1).max(1);
                (first..=last)
                    .step_by(step as usize)
                    .map(|e| 10f64.powi(e))
                    .collect()
            }
            AxisScale::Linear => {
                let raw = (self.hi - self.lo) / 5.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|&s| s >= raw)
                    .unwrap_or(10.0 * mag);
                let start = (self.lo / step).ceil() as i64;
                let end = (self.hi / step).floor() as i64;
                (start..=end).map(|i| i as f64 * step).collect()
            }
        }
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn emit_plot(series: &[Series], meta: &PlotMeta) -> Result<Vec<u8>, PlotError> {
    if series.is_empty() {
        return Err(PlotError::EmptySeries);
    }
    for s in series {
        if s.points.len() < 2 {
            return Err(PlotError::TooFewPoints(s.label.clone()));
        }
        if s.points
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(PlotError::NonFinite(s.label.clone()));
        }
        let bad_log = s.points.iter().any(|&(x, y)| {
            (meta.x_scale == AxisScale::Log && x <= 0.0)
                || (meta.y_scale == AxisScale::Log && y <= 0.0)
        });
        if bad_log {
            return Err(PlotError::NonPositiveOnLogAxis(s.label.clone()));
        }
    }
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let x_axis = Axis::fit(all().map(|p| p.0), meta.x_scale);
    let y_axis = Axis::fit(all().map(|p| p.1), meta.y_scale);

    let (w, h) = (meta.width as f64, meta.height as f64);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + x_axis.unit(x) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - y_axis.unit(y)) * plot_h;

    let mut svg = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        meta.width, meta.height, meta.width, meta.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT:.3}" y="{MARGIN_TOP:.3}" width="{plot_w:.3}" height="{plot_h:.3}" fill="none" stroke="black"/>"#
    );
    for t in x_axis.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0,
            MARGIN_TOP + plot_h + 18.0,
            tick_label(t)
        );
    }
    for t in y_axis.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{MARGIN_LEFT:.3}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 12.0,
        escape(&meta.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.3}" text-anchor="middle" transform="rotate(-90 16 {:.3})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&meta.y_label)
    );
    if !meta.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            escape(&meta.title)
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            SeriesStyle::Line | SeriesStyle::Dashed => {
                let coords: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
                    .collect();
                let dash = if s.style == SeriesStyle::Dashed {
                    r#" stroke-dasharray="6,4""#
                } else {
                    ""
                };
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    coords.join(" ")
                );
            }
            SeriesStyle::Markers => {
                for &(x, y) in &s.points {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{color}"/>"#,
                        px(x),
                        py(y)
                    );
                }
            }
        }
        let ly = MARGIN_TOP + 14.0 + 16.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="2"/><text x="{:.3}" y="{ly:.3}">{}</text>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            lx + 26.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg.into_bytes())
}
