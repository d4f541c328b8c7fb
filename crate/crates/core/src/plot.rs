//! Static SVG line charts of mean error against row count.

use std::fmt::Write;

use crate::experiment::{ExperimentRow, NoiseCase};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const SERIES: [(&str, &str); 3] = [
    ("RBMTLS (eps1)", "#1f77b4"),
    ("RBTLS (eps2)", "#d62728"),
    ("RBLS (eps3)", "#2ca02c"),
];

/// One chart with three polylines (mixed, total, ordinary LS); log10 y axis.
pub fn error_chart(case: NoiseCase, rows: &[ExperimentRow]) -> String {
    let xs: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
    let logs: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.means())
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(f64::log10)
        .collect();

    let (xmin, xmax) = span(&xs);
    let (ymin, ymax) = if logs.is_empty() {
        (-1.0, 1.0)
    } else {
        (floor_pad(span(&logs).0), ceil_pad(span(&logs).1))
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| {
        LEFT + if xmax > xmin {
            (x - xmin) / (xmax - xmin) * plot_w
        } else {
            plot_w / 2.0
        }
    };
    let py = |ly: f64| TOP + plot_h - (ly - ymin) / (ymax - ymin) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">Case {}: mean error against m</text>"#,
        LEFT + plot_w / 2.0,
        case.number()
    );
    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for &x in &xs {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            TOP + plot_h + 18.0,
            x
        );
    }
    let mut decade = ymin;
    while decade <= ymax + 1e-9 {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            py(decade) + 4.0,
            decade as i64,
            y = py(decade)
        );
        decade += 1.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">m</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    for (k, (label, color)) in SERIES.iter().enumerate() {
        let points: Vec<String> = rows
            .iter()
            .filter_map(|r| {
                let v = r.means()[k];
                (v.is_finite() && v > 0.0)
                    .then(|| format!("{:.2},{:.2}", px(r.m as f64), py(v.log10())))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-label="{label}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = TOP + 20.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{label}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn span(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

fn floor_pad(x: f64) -> f64 {
    x.floor()
}

fn ceil_pad(x: f64) -> f64 {
    let c = x.ceil();
    if c == x {
        c + 1.0
    } else {
        c
    }
}
