//! Minimal deterministic SVG line charts for the experiment metrics.
//!
//! Hand-rolled so that identical rows always produce identical bytes; no
//! fonts are embedded and coordinates are formatted with fixed precision.

use std::fmt::Write as _;

use thiserror::Error;

use crate::experiment::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Fraction of runs ending in a global minimum, one series per method.
    GlobalRatio,
    /// Mean paired Hamming distance with standard-error bars.
    Hamming,
}

impl std::str::FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global_ratio" => Ok(Metric::GlobalRatio),
            "hamming" => Ok(Metric::Hamming),
            other => Err(UnknownMetric(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown metric `{0}`; expected `global_ratio` or `hamming`")]
pub struct UnknownMetric(pub String);

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    dash: &'a str,
    points: Vec<(f64, f64, f64)>, // (x value, y value, half error bar)
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders a line chart of the chosen metric against the swept parameter.
/// Output bytes are a pure function of the rows.
pub fn render_plot(rows: &[MetricsRow], metric: Metric) -> String {
    let xs: Vec<f64> = rows.iter().map(|r| r.sweep_value as f64).collect();
    let param = rows.first().map_or("sweep", |r| r.sweep_param.as_str());

    let (title, y_label, series) = match metric {
        Metric::GlobalRatio => {
            let ratio_series = |label, color, dash, pick: fn(&MetricsRow) -> f64| Series {
                label,
                color,
                dash,
                points: rows
                    .iter()
                    .map(|r| {
                        let p = pick(r);
                        let n = r.num_trials as f64;
                        // binomial standard error of the ratio
                        let se = if n > 0.0 { (p * (1.0 - p) / n).sqrt() } else { 0.0 };
                        (r.sweep_value as f64, p, se)
                    })
                    .collect(),
            };
            (
                "global minima ratio",
                "ratio of global solutions",
                vec![
                    ratio_series("compiled", "#1f77b4", "", |r| {
                        *r.global_ratio_wa.numer() as f64 / *r.global_ratio_wa.denom() as f64
                    }),
                    ratio_series("hebbian", "#d62728", "6 4", |r| {
                        *r.global_ratio_hebb.numer() as f64 / *r.global_ratio_hebb.denom() as f64
                    }),
                ],
            )
        }
        Metric::Hamming => (
            "paired hamming distance",
            "mean hamming distance",
            vec![Series {
                label: "compiled vs hebbian",
                color: "#2ca02c",
                dash: "",
                points: rows
                    .iter()
                    .map(|r| {
                        (
                            r.sweep_value as f64,
                            r.mean_paired_hamming,
                            r.stderr_paired_hamming,
                        )
                    })
                    .collect(),
            }],
        ),
    };

    let (x_min, x_max) = match (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ) {
        (min, max) if min.is_finite() && max > min => (min, max),
        (min, _) if min.is_finite() => (min - 1.0, min + 1.0),
        _ => (0.0, 1.0),
    };
    let y_max = match metric {
        Metric::GlobalRatio => 1.05,
        Metric::Hamming => {
            let top = series
                .iter()
                .flat_map(|s| s.points.iter().map(|&(_, y, e)| y + e))
                .fold(0.0, f64::max);
            if top > 0.0 {
                top * 1.2
            } else {
                1.0
            }
        }
    };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |v: f64| MARGIN_LEFT + (v - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| MARGIN_TOP + plot_h - (v / y_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title} vs {param}</text>"#,
        WIDTH / 2.0
    );

    // axes
    let x0 = fmt2(MARGIN_LEFT);
    let y0 = fmt2(MARGIN_TOP + plot_h);
    let x1 = fmt2(MARGIN_LEFT + plot_w);
    let y_top = fmt2(MARGIN_TOP);
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y_top}" stroke="black"/>"#
    );

    // y ticks at 0, 1/4, 1/2, 3/4, 1 of the range
    for k in 0..=4 {
        let v = y_max * k as f64 / 4.0;
        let y = fmt2(to_y(v));
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>"#,
            fmt2(MARGIN_LEFT - 5.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            fmt2(MARGIN_LEFT - 9.0),
            fmt2(to_y(v) + 4.0),
            fmt2(v)
        );
    }
    // x ticks at the data points
    for &x in &xs {
        let px = fmt2(to_x(x));
        let _ = writeln!(
            svg,
            r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/>"#,
            fmt2(MARGIN_TOP + plot_h + 5.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            fmt2(MARGIN_TOP + plot_h + 20.0),
            x as usize
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{param}</text>"#,
        fmt2(MARGIN_LEFT + plot_w / 2.0),
        fmt2(HEIGHT - 16.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {})">{y_label}</text>"#,
        fmt2(MARGIN_TOP + plot_h / 2.0),
        fmt2(MARGIN_TOP + plot_h / 2.0)
    );

    for (si, s) in series.iter().enumerate() {
        let dash_attr = if s.dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{}""#, s.dash)
        };
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y, _)| format!("{},{}", fmt2(to_x(x)), fmt2(to_y(y))))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash_attr}/>"#,
                path.join(" "),
                s.color
            );
        }
        for &(x, y, e) in &s.points {
            let px = fmt2(to_x(x));
            if e > 0.0 {
                let lo = fmt2(to_y((y - e).max(0.0)));
                let hi = fmt2(to_y((y + e).min(y_max)));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{px}" y1="{lo}" x2="{px}" y2="{hi}" stroke="{}"/>"#,
                    s.color
                );
            }
            let _ = writeln!(
                svg,
                r#"<circle cx="{px}" cy="{}" r="3" fill="{}"/>"#,
                fmt2(to_y(y)),
                s.color
            );
        }
        // legend swatch
        let ly = fmt2(MARGIN_TOP + 8.0 + 16.0 * si as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"{dash_attr}/>"#,
            fmt2(MARGIN_LEFT + 10.0),
            fmt2(MARGIN_LEFT + 34.0),
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            fmt2(MARGIN_LEFT + 40.0),
            fmt2(MARGIN_TOP + 12.0 + 16.0 * si as f64),
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}
