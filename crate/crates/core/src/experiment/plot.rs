use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fourier::least_squares;

/// Points of a log-log series; non-positive coordinates are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    /// `(k, values[k-1])`.
    pub fn spectrum(label: &str, values: &[f64]) -> Self {
        Self {
            label: label.to_string(),
            points: values
                .iter()
                .enumerate()
                .map(|(k, v)| ((k + 1) as f64, *v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// `x` range used for the fitted line; all points when `None`.
    pub fit_range: Option<(f64, f64)>,
    /// Decay exponent drawn as a dashed guide through the first fitted point.
    pub predicted: Option<f64>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "k".into(),
            y_label: "value".into(),
            fit_range: None,
            predicted: None,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;
/// Markers drawn at most; longer series are thinned on a log scale.
const MAX_MARKERS: usize = 400;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Standalone SVG: log-log scatter, least-squares line over `fit_range`
/// annotated with its slope, and the predicted-slope guide.
pub fn emit_plot(series: &PlotSeries, style: &PlotStyle) -> Result<String> {
    let pts: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.is_empty() {
        return Err(Error::invalid(
            "series",
            "nothing to plot: no positive points",
        ));
    }
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
    );
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">log10 {}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {})">log10 {}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&style.y_label)
    );
    for (v, anchor, x, y) in [
        (x0, "start", sx(x0), HEIGHT - MARGIN + 18.0),
        (x1, "end", sx(x1), HEIGHT - MARGIN + 18.0),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-size="11">{v:.2}</text>"#
        );
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="11">{v:.2}</text>"#,
            MARGIN - 6.0
        );
    }

    let stride = pts.len().div_ceil(MAX_MARKERS).max(1);
    let mut last_x = f64::NEG_INFINITY;
    let _ = writeln!(svg, r#"<g fill="steelblue" class="markers">"#);
    for (i, (x, y)) in pts.iter().enumerate() {
        // keep every point while sparse, thin evenly in log k once dense
        if pts.len() > MAX_MARKERS
            && i % stride != 0
            && (x - last_x) < (x1 - x0) / MAX_MARKERS as f64
        {
            continue;
        }
        last_x = *x;
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    let _ = writeln!(svg, "</g>");

    let (lo, hi) = style
        .fit_range
        .map(|(a, b)| (a.log10(), b.log10()))
        .unwrap_or((x0, x1));
    let window: Vec<(f64, f64)> = pts
        .iter()
        .copied()
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .collect();
    if window.len() >= 2 {
        let xs: Vec<f64> = window.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = window.iter().map(|p| p.1).collect();
        let (slope, intercept) = least_squares(&xs, &ys);
        let (a, b) = (xs[0], xs[xs.len() - 1]);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="2"/>"#,
            sx(a),
            sy(intercept + slope * a),
            sx(b),
            sy(intercept + slope * b)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="crimson" font-size="13">fitted slope {:.2}</text>"#,
            WIDTH - MARGIN - 150.0,
            MARGIN + 20.0,
            -slope
        );
        if let Some(p) = style.predicted {
            let ya = intercept + slope * a;
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
                sx(a),
                sy(ya),
                sx(b),
                sy(ya - p * (b - a))
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" fill="gray" font-size="13">predicted slope {p:.2}</text>"#,
                WIDTH - MARGIN - 150.0,
                MARGIN + 40.0
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
        MARGIN + 10.0,
        HEIGHT - MARGIN - 10.0,
        escape(&series.label)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_give_two_markers() {
        let s = PlotSeries {
            label: "pair".into(),
            points: vec![(1.0, 1.0), (10.0, 0.01)],
        };
        let svg = emit_plot(&s, &PlotStyle::default()).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<svg").count(), svg.matches("</svg>").count());
    }

    #[test]
    fn planted_power_law_is_annotated() {
        let values: Vec<f64> = (1..=200).map(|k| 3.0 * (k as f64).powi(-2)).collect();
        let style = PlotStyle {
            predicted: Some(2.0),
            ..PlotStyle::default()
        };
        let svg = emit_plot(&PlotSeries::spectrum("planted", &values), &style).unwrap();
        assert!(svg.contains("fitted slope 2.00"));
        assert!(svg.contains("predicted slope 2.00"));
    }

    #[test]
    fn empty_series_is_rejected() {
        let s = PlotSeries {
            label: "none".into(),
            points: vec![(1.0, 0.0)],
        };
        assert!(emit_plot(&s, &PlotStyle::default()).is_err());
        assert!(emit_plot(&PlotSeries::spectrum("e", &[]), &PlotStyle::default()).is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let s = PlotSeries::spectrum("a<b & c", &[1.0, 0.5]);
        let svg = emit_plot(&s, &PlotStyle::default()).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
