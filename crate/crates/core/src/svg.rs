//! Minimal self-contained SVG line plots.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed horizontal reference lines.
    pub hlines: Vec<(f64, String)>,
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

fn bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let pts = panel.series.iter().flat_map(|s| s.points.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    for (y, _) in &panel.hlines {
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0).max(1e-9);
    (x0, x1, y0 - pad, y1 + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(out: &mut String, panel: &Panel, area: Rect, font: f64) {
    let (x0, x1, y0, y1) = bounds(panel);
    let px = |x: f64| area.x + (x - x0) / (x1 - x0) * area.w;
    let py = |y: f64| area.y + area.h - (y - y0) / (y1 - y0) * area.h;

    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="black"/>"#,
        area.x, area.y, area.w, area.h
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}" text-anchor="middle">{:.3}</text>"#,
            px(fx),
            area.y + area.h + font * 1.2,
            fx
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}" text-anchor="end">{:.3}</text>"#,
            area.x - 4.0,
            py(fy) + font / 3.0,
            fy
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="{}" text-anchor="middle">{}</text>"#,
        area.x + area.w / 2.0,
        area.y + area.h + font * 2.6,
        font * 1.1,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="{}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        area.x - font * 3.6,
        area.y + area.h / 2.0,
        font * 1.1,
        area.x - font * 3.6,
        area.y + area.h / 2.0,
        escape(&panel.y_label)
    );
    if !panel.title.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{}" text-anchor="middle">{}</text>"#,
            area.x + area.w / 2.0,
            area.y - font * 0.6,
            font * 1.2,
            escape(&panel.title)
        );
    }
    for (y, label) in &panel.hlines {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.4}" x2="{:.2}" y2="{:.4}" stroke="gray" stroke-dasharray="6 4" data-value="{y}"/>"#,
            area.x,
            py(*y),
            area.x + area.w,
            py(*y)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}" fill="gray" text-anchor="end">{}</text>"#,
            area.x + area.w - 4.0,
            py(*y) - 4.0,
            escape(label)
        );
    }
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = area.y + font * (1.4 + 1.3 * i as f64);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            area.x + 8.0,
            area.x + 28.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}">{}</text>"#,
            area.x + 32.0,
            ly + font / 3.0,
            escape(&s.label)
        );
    }
}

/// Render a main panel with an optional inset in the upper right corner.
pub fn render(main: &Panel, inset: Option<&Panel>) -> String {
    let (w, h) = (720.0, 480.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    let area = Rect {
        x: 90.0,
        y: 40.0,
        w: w - 120.0,
        h: h - 110.0,
    };
    draw_panel(&mut out, main, area, 12.0);
    if let Some(inset) = inset {
        let r = Rect {
            x: area.x + area.w * 0.58,
            y: area.y + area.h * 0.42,
            w: area.w * 0.36,
            h: area.h * 0.33,
        };
        draw_panel(&mut out, inset, r, 9.0);
    }
    out.push_str("</svg>\n");
    out
}
