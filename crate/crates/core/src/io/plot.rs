use std::fmt::Write;

use crate::error::{Result, WdsError};
use crate::metrics::CurvePoint;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            x_label: "Es/N0 (dB)".into(),
            y_label: "BER".into(),
            log_y: true,
            width: 640.0,
            height: 440.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders curves with confidence bars as a standalone SVG document. On a log
/// axis, zero values (no errors observed) are left out.
pub fn render_svg(series: &[Series], opts: &PlotOptions) -> Result<String> {
    let usable = |v: f64| v.is_finite() && (!opts.log_y || v > 0.0);
    let pts: Vec<&CurvePoint> = series.iter().flat_map(|s| &s.points).filter(|p| usable(p.value)).collect();
    if pts.is_empty() {
        return Err(WdsError::OutOfRange("nothing to plot".into()));
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p.es_n0_db);
        x1 = x1.max(p.es_n0_db);
        for v in [p.value, p.ci_low, p.ci_high] {
            if usable(v) {
                y0 = y0.min(v);
                y1 = y1.max(v);
            }
        }
    }
    if x1 == x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let ty = |v: f64| if opts.log_y { v.log10() } else { v };
    let (mut ly0, mut ly1) = (ty(y0), ty(y1));
    if opts.log_y {
        ly0 = ly0.floor();
        ly1 = ly1.ceil().max(ly0 + 1.0);
    } else if ly1 == ly0 {
        ly0 -= 0.5;
        ly1 += 0.5;
    }

    let (w, h) = (opts.width, opts.height);
    let (left, right, top, bottom) = (70.0, 160.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |v: f64| top + (1.0 - (ty(v) - ly0) / (ly1 - ly0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(&opts.title)
    );

    // Grid and ticks.
    let xticks = 6;
    for i in 0..=xticks {
        let x = x0 + (x1 - x0) * i as f64 / xticks as f64;
        let px = sx(x);
        let _ = writeln!(s, r##"<line x1="{px:.1}" y1="{top}" x2="{px:.1}" y2="{:.1}" stroke="#ddd"/>"##, top + ph);
        let _ = writeln!(s, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{x:.1}</text>"#, top + ph + 16.0);
    }
    if opts.log_y {
        for d in ly0 as i32..=ly1 as i32 {
            let py = sy(10f64.powi(d));
            let _ = writeln!(s, r##"<line x1="{left}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##, left + pw);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, left - 6.0, py + 4.0);
        }
    } else {
        for i in 0..=5 {
            let v = ly0 + (ly1 - ly0) * i as f64 / 5.0;
            let py = sy(v);
            let _ = writeln!(s, r##"<line x1="{left}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##, left + pw);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, left - 6.0, py + 4.0);
        }
    }
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 12.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        top + ph / 2.0,
        escape(&opts.y_label)
    );

    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let good: Vec<&CurvePoint> = ser.points.iter().filter(|p| usable(p.value)).collect();
        let path: Vec<String> = good.iter().map(|p| format!("{:.1},{:.1}", sx(p.es_n0_db), sy(p.value))).collect();
        if !path.is_empty() {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        for p in &good {
            let (px, py) = (sx(p.es_n0_db), sy(p.value));
            let lo = if usable(p.ci_low) { p.ci_low } else { p.value };
            let hi = if usable(p.ci_high) { p.ci_high } else { p.value };
            let _ = writeln!(
                s,
                r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="{color}"/><circle cx="{px:.1}" cy="{py:.1}" r="3" fill="{color}"/>"#,
                sy(lo),
                sy(hi)
            );
        }
        let ly = top + 14.0 + 18.0 * k as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
