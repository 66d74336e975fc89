//! Minimal deterministic SVG figures: heatmaps, line charts with optional
//! error bars, and scatter/trajectory overlays. All coordinates are emitted
//! with fixed precision so identical inputs produce identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;

pub const SERIES_COLORS: &[&str] = &["#c0392b", "#2471a3", "#1e8449", "#8e44ad", "#b7950b"];

fn px(v: f64) -> String {
    format!("{v:.2}")
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_hi - self.x_lo).max(1e-300);
        MARGIN_L + (v - self.x_lo) / span * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_hi - self.y_lo).max(1e-300);
        HEIGHT - MARGIN_B - (v - self.y_lo) / span * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        px(WIDTH / 2.0),
        escape(title)
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>",
        px(MARGIN_L),
        px(MARGIN_T),
        px(WIDTH - MARGIN_L - MARGIN_R),
        px(HEIGHT - MARGIN_T - MARGIN_B)
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x_lo + t * (frame.x_hi - frame.x_lo);
        let yv = frame.y_lo + t * (frame.y_hi - frame.y_lo);
        let xp = frame.x(xv);
        let yp = frame.y(yv);
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"#333333\" stroke-width=\"1\"/>",
            x = px(xp),
            b = px(HEIGHT - MARGIN_B),
            b2 = px(HEIGHT - MARGIN_B + 5.0)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            px(xp),
            px(HEIGHT - MARGIN_B + 18.0),
            format_tick(xv)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{l}\" y1=\"{y}\" x2=\"{l2}\" y2=\"{y}\" stroke=\"#333333\" stroke-width=\"1\"/>",
            l = px(MARGIN_L - 5.0),
            l2 = px(MARGIN_L),
            y = px(yp)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            px(MARGIN_L - 8.0),
            px(yp + 4.0),
            format_tick(yv)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        px((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        px(HEIGHT - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        px((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        px((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        escape(y_label)
    );
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 1000.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

/// Blue-to-red diverging colormap over [0, 1].
fn colormap(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| a + (b - a) * t;
    // dark blue -> light gray -> dark red
    let (r, g, b) = if t < 0.5 {
        let u = t * 2.0;
        (33.0 + (230.0 - 33.0) * u, 102.0 + (230.0 - 102.0) * u, 172.0 + (230.0 - 172.0) * u)
    } else {
        let u = (t - 0.5) * 2.0;
        (230.0 + (178.0 - 230.0) * u, 230.0 + (24.0 - 230.0) * u, 230.0 + (43.0 - 230.0) * u)
    };
    let _ = lerp;
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Heatmap of `values[iy][ix]` over the rectangle spanned by the axis ranges,
/// colored over [vmin, vmax].
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub values: &'a [Vec<f64>],
    pub v_range: (f64, f64),
    /// Optional overlay polyline plus markers in data coordinates.
    pub trajectory: Option<&'a [(f64, f64)]>,
    /// Optional point markers `(x, y, color)` in data coordinates.
    pub markers: &'a [(f64, f64, &'a str)],
}

pub fn heatmap(spec: &Heatmap) -> String {
    let frame = Frame {
        x_lo: spec.x_range.0,
        x_hi: spec.x_range.1,
        y_lo: spec.y_range.0,
        y_hi: spec.y_range.1,
    };
    let mut s = open_svg(spec.title);
    let ny = spec.values.len();
    let nx = spec.values.first().map_or(0, |row| row.len());
    let span = (spec.v_range.1 - spec.v_range.0).max(1e-300);
    for (iy, row) in spec.values.iter().enumerate() {
        for (ix, v) in row.iter().enumerate() {
            let x0 = frame.x(spec.x_range.0 + (spec.x_range.1 - spec.x_range.0) * ix as f64 / nx as f64);
            let x1 = frame.x(spec.x_range.0 + (spec.x_range.1 - spec.x_range.0) * (ix + 1) as f64 / nx as f64);
            // row 0 at the bottom of the plot
            let y1 = frame.y(spec.y_range.0 + (spec.y_range.1 - spec.y_range.0) * iy as f64 / ny as f64);
            let y0 = frame.y(spec.y_range.0 + (spec.y_range.1 - spec.y_range.0) * (iy + 1) as f64 / ny as f64);
            let t = (v - spec.v_range.0) / span;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                px(x0),
                px(y0),
                px(x1 - x0 + 0.5),
                px(y1 - y0 + 0.5),
                colormap(t)
            );
        }
    }
    if let Some(path) = spec.trajectory {
        if !path.is_empty() {
            let points: Vec<String> =
                path.iter().map(|(x, y)| format!("{},{}", px(frame.x(*x)), px(frame.y(*y)))).collect();
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>",
                points.join(" ")
            );
            let (fx, fy) = path[path.len() - 1];
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#f1c40f\" stroke=\"#000000\" stroke-width=\"1\"/>",
                px(frame.x(fx)),
                px(frame.y(fy))
            );
        }
    }
    for (x, y, color) in spec.markers {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
            px(frame.x(*x)),
            px(frame.y(*y))
        );
    }
    axes(&mut s, &frame, spec.x_label, spec.y_label);
    s.push_str("</svg>\n");
    s
}

/// One named line with optional per-point error bars.
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
    pub error: Option<Vec<f64>>,
    pub color: &'a str,
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for (i, (x, y)) in s.points.iter().enumerate() {
            let e = s.error.as_ref().map_or(0.0, |e| e[i]);
            x_lo = x_lo.min(*x);
            x_hi = x_hi.max(*x);
            y_lo = y_lo.min(y - e);
            y_hi = y_hi.max(y + e);
        }
    }
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (y_hi - y_lo).abs() < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let frame = Frame { x_lo, x_hi, y_lo: y_lo - pad, y_hi: y_hi + pad };

    let mut out = open_svg(title);
    for (si, s) in series.iter().enumerate() {
        if let Some(errors) = &s.error {
            for ((x, y), e) in s.points.iter().zip(errors) {
                let _ = writeln!(
                    out,
                    "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"{c}\" stroke-width=\"1\"/>",
                    x0 = px(frame.x(*x)),
                    y0 = px(frame.y(y - e)),
                    y1 = px(frame.y(y + e)),
                    c = s.color
                );
            }
        }
        let points: Vec<String> =
            s.points.iter().map(|(x, y)| format!("{},{}", px(frame.x(*x)), px(frame.y(*y)))).collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            points.join(" "),
            s.color
        );
        for (x, y) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>",
                px(frame.x(*x)),
                px(frame.y(*y)),
                s.color
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>",
            px(MARGIN_L + 10.0),
            px(MARGIN_T + 16.0 + 16.0 * si as f64),
            s.color,
            escape(s.name)
        );
    }
    axes(&mut out, &frame, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// Scatter of colored point groups plus optional straight edges.
pub struct ScatterGroup<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
}

pub fn scatter(
    title: &str,
    x_label: &str,
    y_label: &str,
    groups: &[ScatterGroup],
    edges: &[((f64, f64), (f64, f64), &str)],
) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for g in groups {
        for (x, y) in &g.points {
            x_lo = x_lo.min(*x);
            x_hi = x_hi.max(*x);
            y_lo = y_lo.min(*y);
            y_hi = y_hi.max(*y);
        }
    }
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let pad_x = 0.05 * (x_hi - x_lo).max(1e-9);
    let pad_y = 0.05 * (y_hi - y_lo).max(1e-9);
    let frame = Frame {
        x_lo: x_lo - pad_x,
        x_hi: x_hi + pad_x,
        y_lo: y_lo - pad_y,
        y_hi: y_hi + pad_y,
    };
    let mut out = open_svg(title);
    for ((ax, ay), (bx, by), color) in edges {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1\"/>",
            px(frame.x(*ax)),
            px(frame.y(*ay)),
            px(frame.x(*bx)),
            px(frame.y(*by))
        );
    }
    for (gi, g) in groups.iter().enumerate() {
        for (x, y) in &g.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>",
                px(frame.x(*x)),
                px(frame.y(*y)),
                g.color
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>",
            px(MARGIN_L + 10.0),
            px(MARGIN_T + 16.0 + 16.0 * gi as f64),
            g.color,
            escape(g.name)
        );
    }
    axes(&mut out, &frame, x_label, y_label);
    out.push_str("</svg>\n");
    out
}
