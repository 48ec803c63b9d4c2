// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal static SVG plots: points with error bars and dashed prediction
//! overlays. No interactivity; the output is a deterministic artifact.

use std::path::Path;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// 1-sigma error bars, one per point (empty for none).
    pub errors: Vec<f64>,
    pub color: &'a str,
    pub dashed: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

/// Renders series into an SVG file with linear axes sized to the data.
pub fn write_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let e = s.errors.get(i).copied().unwrap_or(0.0);
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y - e);
            y_max = y_max.max(y + e);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max - x_min).abs() < 1e-300 {
        x_max = x_min + 1.0;
    }
    if (y_max - y_min).abs() < 1e-300 {
        y_max = y_min + 1.0;
    }
    let pad = 0.06 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN),
        )
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" font-family=\"sans-serif\">{title}</text>\n",
        WIDTH / 2.0
    ));

    // Axes.
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{MARGIN}\" stroke=\"black\"/>\n"
    ));
    for k in 0..=4 {
        let fx = x_min + (x_max - x_min) * k as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * k as f64 / 4.0;
        let (px, _) = to_px(fx, y_min);
        let (_, py) = to_px(x_min, fy);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt2(px),
            fmt2(px),
            fmt2(y0 + 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
            fmt2(px),
            fmt2(y0 + 18.0),
            fmt_tick(fx)
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{x0}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt2(x0 - 4.0),
            fmt2(py),
            fmt2(py)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
            fmt2(x0 - 8.0),
            fmt2(py + 4.0),
            fmt_tick(fy)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">{x_label}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" \
         transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    // Series.
    for (idx, s) in series.iter().enumerate() {
        if s.dashed {
            let path_points: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = to_px(x, y);
                    format!("{},{}", fmt2(px), fmt2(py))
                })
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n",
                path_points.join(" "),
                s.color
            ));
        } else {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                let (px, py) = to_px(x, y);
                if let Some(&e) = s.errors.get(i) {
                    if e > 0.0 {
                        let (_, py_lo) = to_px(x, y - e);
                        let (_, py_hi) = to_px(x, y + e);
                        svg.push_str(&format!(
                            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n",
                            fmt2(px),
                            fmt2(py_lo),
                            fmt2(px),
                            fmt2(py_hi),
                            s.color
                        ));
                    }
                }
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>\n",
                    fmt2(px),
                    fmt2(py),
                    s.color
                ));
            }
        }
        // Legend.
        let ly = MARGIN + 16.0 * idx as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"{}/>\n",
            WIDTH - MARGIN - 120.0,
            fmt2(ly),
            WIDTH - MARGIN - 95.0,
            fmt2(ly),
            s.color,
            if s.dashed {
                " stroke-dasharray=\"6 4\""
            } else {
                ""
            }
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
            WIDTH - MARGIN - 88.0,
            fmt2(ly + 4.0),
            s.label
        ));
    }
    svg.push_str("</svg>\n");

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, svg)
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.abs() >= 0.01 && x.abs() < 10000.0 {
        let s = format!("{x:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.2e}")
    }
}
