//! SVG plots of `log p̂` against the regressor `n^r`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fpp_core::estimators::{fit_rate, rate_target, RateTarget};
use fpp_core::{EdgeWeightModel, WeibullModel};

use crate::error::{CliError, Result};
use crate::rows::{read_csv, ResultRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub estimator: String,
    /// `(n^r, log p̂)` for finite estimates.
    pub points: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub title: String,
    pub r: f64,
    pub series: Vec<Series>,
    pub theory_slope: Option<f64>,
}

/// Reconstructs enough of the model from a row to recover the theory slope.
fn theory_slope(row: &ResultRow) -> Option<f64> {
    let (alpha, r, xi) = (row.alpha?, row.r?, row.xi?);
    if !row.model.starts_with("weibull") {
        return None;
    }
    let model = EdgeWeightModel::Weibull(WeibullModel::new(alpha, r).ok()?);
    match rate_target(&model, row.d, xi)? {
        RateTarget::Limit { slope } => Some(slope),
        RateTarget::Oscillating { .. } => None,
    }
}

pub fn plot_data(rows: &[ResultRow]) -> Result<PlotData> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::Runtime("no rows to plot".into()))?;
    let r = first.r.unwrap_or(1.0);
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        if row.log_p.is_finite() && row.estimator != "mean" {
            groups
                .entry(row.estimator.clone())
                .or_default()
                .push((row.n as f64, row.log_p));
        }
    }
    if groups.is_empty() {
        return Err(CliError::Runtime("no finite tail estimates to plot".into()));
    }
    let series = groups
        .into_iter()
        .map(|(estimator, pts)| {
            let fit = fit_rate(&pts, r).ok();
            Series {
                estimator,
                points: pts.iter().map(|&(n, y)| (n.powf(r), y)).collect(),
                slope: fit.as_ref().map(|f| f.slope),
                intercept: fit.as_ref().map(|f| f.intercept),
            }
        })
        .collect();
    Ok(PlotData {
        title: format!("{} ({}, d={})", first.experiment, first.model, first.d),
        r,
        series,
        theory_slope: theory_slope(first),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(data: &PlotData) -> String {
    let all: Vec<(f64, f64)> = data.series.iter().flat_map(|s| s.points.clone()).collect();
    let (mut x0, mut x1) = bounds(all.iter().map(|p| p.0));
    let (mut y0, mut y1) = bounds(all.iter().map(|p| p.1));
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&data.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            sx(x),
            HEIGHT - MARGIN + 18.0,
            x
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.2}</text>"#,
            MARGIN - 6.0,
            sy(y) + 4.0,
            y
        );
    }
    let xlabel = if data.r == 1.0 { "n".to_string() } else { format!("n^{}", data.r) };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">log p</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let line = |svg: &mut String, slope: f64, intercept: f64, colour: &str, dash: &str| {
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-dasharray="{dash}"/>"#,
            sx(x0),
            sy(intercept + slope * x0),
            sx(x1),
            sy(intercept + slope * x1)
        );
    };
    let mut legend = Vec::new();
    for (i, s) in data.series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{colour}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let mut label = s.estimator.clone();
        if let (Some(m), Some(b)) = (s.slope, s.intercept) {
            line(&mut svg, m, b, colour, "none");
            label = format!("{label} fit slope {m:.4}");
        }
        legend.push((label, colour));
    }
    if let Some(m) = data.theory_slope {
        let (cx, cy) = centroid(&all);
        line(&mut svg, m, cy - m * cx, "gray", "6 4");
        legend.push((format!("theory slope {m:.4}"), "gray"));
    }
    for (i, (label, colour)) in legend.iter().enumerate() {
        let y = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN - 8.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn pad(lo: &mut f64, hi: &mut f64) {
    let span = (*hi - *lo).max(1e-9);
    *lo -= 0.05 * span;
    *hi += 0.05 * span;
}

fn centroid(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    (sx / n, sy / n)
}

/// Reads a results CSV and writes the plot.
pub fn plot_file(csv: &Path, svg: &Path) -> Result<PlotData> {
    let rows = read_csv(csv)?;
    let data = plot_data(&rows)?;
    std::fs::write(svg, render_svg(&data)).map_err(|e| CliError::io(svg, e))?;
    Ok(data)
}
