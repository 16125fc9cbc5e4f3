//! Minimal SVG box plots: inter-quartile boxes and a median line, no whiskers.

use std::fmt::Write;

use crate::util::{median, quantile};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const FILLS: [&str; 4] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];

/// One box per group. Switches to a log10 axis when all values are positive
/// and span more than two decades. Output depends only on the inputs.
pub fn box_plot(title: &str, y_label: &str, groups: &[(String, Vec<f64>)]) -> String {
    let stats: Vec<(f64, f64, f64)> = groups
        .iter()
        .map(|(_, v)| (quantile(v, 0.25), median(v), quantile(v, 0.75)))
        .collect();
    let finite: Vec<f64> = stats
        .iter()
        .flat_map(|&(a, b, c)| [a, b, c])
        .filter(|v| v.is_finite())
        .collect();
    let (mut lo, mut hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if finite.is_empty() {
        (lo, hi) = (0.0, 1.0);
    }
    let log = lo > 0.0 && hi / lo > 100.0;
    let t = |v: f64| if log { v.log10() } else { v };
    let (mut a, mut b) = (t(lo), t(hi));
    if a == b {
        a -= 0.5;
        b += 0.5;
    }
    let pad = (b - a) * 0.08;
    let (a, b) = (a - pad, b + pad);
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - (t(v) - a) / (b - a));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    );
    for i in 0..=4 {
        let tv = a + (b - a) * i as f64 / 4.0;
        let py = TOP + plot_h * (1.0 - i as f64 / 4.0);
        let label = if log { format!("1e{tv:.1}") } else { format!("{tv:.3e}") };
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#, LEFT - 6.0, py + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + plot_h / 2.0,
        escape(&if log { format!("{y_label} (log scale)") } else { y_label.to_string() })
    );

    let slot = (WIDTH - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (i, ((name, _), &(q1, med, q3))) in groups.iter().zip(&stats).enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let w = (slot * 0.5).min(80.0);
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 20.0,
            escape(name)
        );
        if !(q1.is_finite() && q3.is_finite() && med.is_finite()) {
            continue;
        }
        let (top, bottom) = (y(q3), y(q1));
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{top:.1}" width="{w:.1}" height="{:.1}" fill="{}" fill-opacity="0.6" stroke="black"/>"#,
            cx - w / 2.0,
            (bottom - top).max(1.0),
            FILLS[i % FILLS.len()]
        );
        let my = y(med);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{my:.1}" x2="{:.1}" y2="{my:.1}" stroke="black" stroke-width="2"/>"#,
            cx - w / 2.0,
            cx + w / 2.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
