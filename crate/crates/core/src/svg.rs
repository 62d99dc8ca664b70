//! Minimal deterministic SVG plotting. The figures only need line charts,
//! step/CCDF curves (optionally on log axes), vertical bars, and box
//! plots, so this is a small hand-rolled writer rather than a plotting
//! dependency. Output is plain text and byte-stable for identical input.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 46.0;

const PALETTE: [&str; 6] = [
    "#1f6fb2", "#d1495b", "#66a182", "#edae49", "#8d6a9f", "#555555",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

/// One named curve; points with non-finite coordinates break the polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
        Series { label: label.into(), points }
    }
}

/// Five-number summary drawn as one box in a box plot.
#[derive(Debug, Clone)]
pub struct BoxStats {
    pub label: String,
    pub low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub high: f64,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Chart {
        Chart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: Vec::new(),
        }
    }

    pub fn log_y(mut self) -> Chart {
        self.y_scale = Scale::Log10;
        self
    }

    pub fn log_log(mut self) -> Chart {
        self.x_scale = Scale::Log10;
        self.y_scale = Scale::Log10;
        self
    }

    pub fn with(mut self, series: Series) -> Chart {
        self.series.push(series);
        self
    }

    pub fn write_svg(&self, path: &Path) -> Result<()> {
        crate::output::write_text(path, &self.render())
    }

    pub fn render(&self) -> String {
        let (x_min, x_max) = self.range(|p| p.0, self.x_scale);
        let (y_min, y_max) = self.range(|p| p.1, self.y_scale);
        let x_axis = Axis::fit(x_min, x_max, self.x_scale);
        let y_axis = Axis::fit(y_min, y_max, self.y_scale);

        let mut svg = header(&self.title);
        frame(&mut svg, &x_axis, &y_axis, &self.x_label, &self.y_label);
        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut d = String::new();
            let mut pen_up = true;
            for &(x, y) in &series.points {
                let (px, py) = (x_axis.to_px_x(x), y_axis.to_px_y(y));
                if !px.is_finite() || !py.is_finite() {
                    pen_up = true;
                    continue;
                }
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, px, py);
                pen_up = false;
            }
            let _ = writeln!(
                svg,
                r##"<path d="{}" fill="none" stroke="{}" stroke-width="1.4"/>"##,
                d.trim_end(),
                color
            );
        }
        legend(&mut svg, &self.series);
        svg.push_str("</svg>\n");
        svg
    }

    fn range(&self, pick: impl Fn(&(f64, f64)) -> f64, scale: Scale) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.series {
            for p in &s.points {
                let v = pick(p);
                if !v.is_finite() || (scale == Scale::Log10 && v <= 0.0) {
                    continue;
                }
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo > hi {
            (0.0, 1.0)
        } else if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    }
}

/// Renders a box plot from five-number summaries.
pub fn box_plot(title: &str, y_label: &str, boxes: &[BoxStats], path: &Path) -> Result<()> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in boxes {
        lo = lo.min(b.low);
        hi = hi.max(b.high);
    }
    if lo > hi {
        (lo, hi) = (0.0, 1.0);
    } else if lo == hi {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let y_axis = Axis::fit(lo, hi, Scale::Linear);
    let x_axis = Axis::category(boxes.len());

    let mut svg = header(title);
    frame_y_only(&mut svg, &y_axis, y_label);
    let slot = x_axis.span_px() / boxes.len().max(1) as f64;
    let box_w = (slot * 0.5).min(70.0);
    for (i, b) in boxes.iter().enumerate() {
        let cx = x_axis.left + slot * (i as f64 + 0.5);
        let color = PALETTE[i % PALETTE.len()];
        let (x0, x1) = (cx - box_w / 2.0, cx + box_w / 2.0);
        let (y_low, y_q1) = (y_axis.to_px_y(b.low), y_axis.to_px_y(b.q1));
        let (y_med, y_q3) = (y_axis.to_px_y(b.median), y_axis.to_px_y(b.q3));
        let y_high = y_axis.to_px_y(b.high);
        let line = |svg: &mut String, xa: f64, ya: f64, xb: f64, yb: f64| {
            let _ = writeln!(
                svg,
                r##"<line x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}" stroke="{color}" stroke-width="1.4"/>"##
            );
        };
        line(&mut svg, cx, y_low, cx, y_q1);
        line(&mut svg, cx, y_q3, cx, y_high);
        line(&mut svg, cx - box_w / 4.0, y_low, cx + box_w / 4.0, y_low);
        line(&mut svg, cx - box_w / 4.0, y_high, cx + box_w / 4.0, y_high);
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.2}" y="{y_q3:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="{color}" stroke-width="1.4"/>"##,
            w = x1 - x0,
            h = y_q1 - y_q3
        );
        line(&mut svg, x0, y_med, x1, y_med);
        let _ = writeln!(
            svg,
            r##"<text x="{cx:.2}" y="{y:.2}" font-size="12" text-anchor="middle" fill="#333">{}</text>"##,
            escape(&b.label),
            y = HEIGHT - MARGIN_B + 18.0
        );
    }
    svg.push_str("</svg>\n");
    crate::output::write_text(path, &svg)
}

struct Axis {
    lo: f64,
    hi: f64,
    scale: Scale,
    left: f64,
    ticks: Vec<f64>,
}

impl Axis {
    fn fit(lo: f64, hi: f64, scale: Scale) -> Axis {
        let (lo, hi) = match scale {
            Scale::Linear => pad_linear(lo, hi),
            Scale::Log10 => (lo, hi),
        };
        let ticks = match scale {
            Scale::Linear => linear_ticks(lo, hi),
            Scale::Log10 => log_ticks(lo, hi),
        };
        Axis { lo, hi, scale, left: MARGIN_L, ticks }
    }

    fn category(_n: usize) -> Axis {
        Axis { lo: 0.0, hi: 1.0, scale: Scale::Linear, left: MARGIN_L, ticks: Vec::new() }
    }

    fn span_px(&self) -> f64 {
        WIDTH - MARGIN_L - MARGIN_R
    }

    fn frac(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.lo) / (self.hi - self.lo),
            Scale::Log10 => {
                if v <= 0.0 {
                    f64::NAN
                } else {
                    (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
                }
            }
        }
    }

    fn to_px_x(&self, v: f64) -> f64 {
        MARGIN_L + self.frac(v) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn to_px_y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B - self.frac(v) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn pad_linear(lo: f64, hi: f64) -> (f64, f64) {
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 7.0)
        .unwrap_or(mag * 10.0);
    let mut t = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    while t <= hi + step * 1e-9 {
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    ticks
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut ticks = Vec::new();
    let mut e = lo.log10().floor() as i32;
    while 10f64.powi(e) <= hi * (1.0 + 1e-9) {
        let t = 10f64.powi(e);
        if t >= lo * (1.0 - 1e-9) {
            ticks.push(t);
        }
        e += 1;
    }
    ticks
}

fn header(title: &str) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<text x="{x:.1}" y="20" font-size="15" text-anchor="middle" fill="#111">{}</text>"##,
        escape(title),
        x = WIDTH / 2.0
    );
    svg
}

fn frame(svg: &mut String, x_axis: &Axis, y_axis: &Axis, x_label: &str, y_label: &str) {
    frame_y_only(svg, y_axis, y_label);
    for &t in &x_axis.ticks {
        let px = x_axis.to_px_x(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{y1:.2}" stroke="#dddddd"/>"##,
            y0 = MARGIN_T,
            y1 = HEIGHT - MARGIN_B
        );
        let _ = writeln!(
            svg,
            r##"<text x="{px:.2}" y="{y:.2}" font-size="11" text-anchor="middle" fill="#333">{}</text>"##,
            tick_label(t),
            y = HEIGHT - MARGIN_B + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{x:.1}" y="{y:.1}" font-size="12" text-anchor="middle" fill="#111">{}</text>"##,
        escape(x_label),
        x = (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        y = HEIGHT - 10.0
    );
}

fn frame_y_only(svg: &mut String, y_axis: &Axis, y_label: &str) {
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{w}" height="{h}" fill="none" stroke="#999999"/>"##,
        w = WIDTH - MARGIN_L - MARGIN_R,
        h = HEIGHT - MARGIN_T - MARGIN_B
    );
    for &t in &y_axis.ticks {
        let py = y_axis.to_px_y(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#dddddd"/>"##,
            x0 = MARGIN_L,
            x1 = WIDTH - MARGIN_R
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x:.1}" y="{y:.2}" font-size="11" text-anchor="end" fill="#333">{}</text>"##,
            tick_label(t),
            x = MARGIN_L - 6.0,
            y = py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="14" y="{y:.1}" font-size="12" text-anchor="middle" fill="#111" transform="rotate(-90 14 {y:.1})">{}</text>"##,
        escape(y_label),
        y = (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    );
}

fn legend(svg: &mut String, series: &[Series]) {
    if series.len() < 2 {
        return;
    }
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_T + 14.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN_R - 150.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{y:.1}" x2="{x2:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"##,
            x2 = x + 18.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x3:.1}" y="{y2:.1}" font-size="11" fill="#333">{}</text>"##,
            escape(&s.label),
            x3 = x + 24.0,
            y2 = y + 4.0
        );
    }
}

fn tick_label(t: f64) -> String {
    if t != 0.0 && (t.abs() >= 1e5 || t.abs() < 1e-3) {
        format!("{t:.0e}")
    } else {
        let s = format!("{t:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_line_chart() {
        let chart = Chart::new("title", "x", "y")
            .with(Series::new("a", vec![(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)]));
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<path"));
    }

    #[test]
    fn render_is_deterministic() {
        let make = || {
            Chart::new("t", "x", "y")
                .log_log()
                .with(Series::new("a", vec![(0.01, 0.9), (0.1, 0.5), (1.0, 0.01)]))
                .render()
        };
        assert_eq!(make(), make());
    }

    #[test]
    fn log_scale_skips_nonpositive() {
        let chart = Chart::new("t", "x", "y")
            .log_y()
            .with(Series::new("a", vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]));
        let svg = chart.render();
        assert!(svg.contains("<path"));
    }

    #[test]
    fn linear_ticks_cover_range() {
        let ticks = linear_ticks(0.0, 10.0);
        assert!(ticks.len() >= 3 && ticks.len() <= 8);
        assert!(ticks.iter().all(|t| (0.0..=10.0).contains(t)));
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b&c"), "a&lt;b&amp;c");
    }
}
