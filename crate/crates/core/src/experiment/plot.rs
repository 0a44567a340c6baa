use std::fmt::Write;

use crate::bbm::{ConvergenceReport, Mode};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&v.abs()) {
        format!("{}", (v * 1e4).round() / 1e4)
    } else {
        format!("{v:.1e}")
    }
}

/// Functional values (and the target, when known) against the schedule on a
/// logarithmic horizontal axis.
pub fn render_svg(report: &ConvergenceReport) -> String {
    let xs = &report.schedule;
    let ys = &report.functional_values;
    let x_label = match report.mode {
        Mode::Rdati => "nu",
        Mode::Gagliardo => "1 - s",
    };
    // log scale needs positive abscissae; gagliardo is drawn against 1 - s
    let abscissa: Vec<f64> = match report.mode {
        Mode::Rdati => xs.clone(),
        Mode::Gagliardo => xs.iter().map(|s| 1.0 - s).collect(),
    };
    let lx: Vec<f64> = abscissa.iter().map(|x| x.log10()).collect();
    let (mut x0, mut x1) = lx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let mut y_all: Vec<f64> = ys.clone();
    y_all.extend(report.target);
    let (mut y0, mut y1) = y_all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    y0 = y0.min(0.0);
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    y1 += 0.05 * (y1 - y0);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |lx: f64| LEFT + (lx - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle">{} ({}, p = {}) verdict: {}</text>"#,
        WIDTH / 2.0,
        escape(&report.space),
        x_label,
        report.p,
        serde_json::to_value(report.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for d in (x0.floor() as i32)..=(x1.ceil() as i32) {
        let l = d as f64;
        if l < x0 - 1e-9 || l > x1 + 1e-9 {
            continue;
        }
        let x = px(l);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, TOP + ph + 18.0);
    }
    for k in 0..=4 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        let yy = py(y);
        let _ = writeln!(s, r#"<line x1="{}" y1="{yy:.2}" x2="{LEFT}" y2="{yy:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, yy + 4.0, fmt_tick(y));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label} (log scale)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    if let Some(t) = report.target {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
            LEFT + pw
        );
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" fill="firebrick">target</text>"#, LEFT + pw - 4.0, y - 4.0);
    }
    let pts: Vec<String> = lx.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, pts.join(" "));
    for (&x, &y) in lx.iter().zip(ys) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, px(x), py(y));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
