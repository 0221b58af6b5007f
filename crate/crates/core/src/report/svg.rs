use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{escape, num, write_file};
use crate::error::{Error, Result};
use crate::estimators::EstimateKind;
use crate::harness::CaseStudy;
use crate::stats::FactorRanks;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn header(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        num(w), num(h), num(w), num(h), num(w), num(h)
    )
}

/// Radar plot input: one spoke per dataset, one series per method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlyphSpec {
    pub title: String,
    pub spokes: Vec<String>,
    pub series: Vec<(String, Vec<f64>)>,
    /// Value drawn at the outer ring; defaults to the largest value.
    pub scale: Option<f64>,
}

impl GlyphSpec {
    pub fn new(title: impl Into<String>, spokes: Vec<String>, series: Vec<(String, Vec<f64>)>) -> Self {
        GlyphSpec {
            title: title.into(),
            spokes,
            series,
            scale: None,
        }
    }

    pub fn from_factor_ranks(title: impl Into<String>, f: &FactorRanks) -> Self {
        Self::new(title, f.spokes.clone(), f.series.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.spokes.len() < 3 {
            return Err(Error::invalid(format!("glyph plot needs at least 3 spokes, got {}", self.spokes.len())));
        }
        for (name, v) in &self.series {
            if v.len() != self.spokes.len() {
                return Err(Error::invalid(format!(
                    "glyph series {name:?} has {} values for {} spokes",
                    v.len(),
                    self.spokes.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::invalid(format!("glyph series {name:?} has a negative or non-finite value")));
            }
        }
        Ok(())
    }
}

/// Area of the star polygon with the given radii on equally spaced spokes.
pub fn polygon_area(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 3 {
        return 0.0;
    }
    let s = (2.0 * PI / m as f64).sin();
    (0..m).map(|i| values[i] * values[(i + 1) % m]).sum::<f64>() * s / 2.0
}

pub fn glyph_svg(spec: &GlyphSpec) -> Result<String> {
    spec.validate()?;
    let (cx, cy, radius) = (300.0, 320.0, 220.0);
    let legend_x = 620.0;
    let height = (640.0f64).max(80.0 + 18.0 * spec.series.len() as f64);
    let m = spec.spokes.len();
    let max = spec.series.iter().flat_map(|s| s.1.iter().copied()).fold(0.0, f64::max);
    let scale = spec.scale.unwrap_or(if max > 0.0 { max } else { 1.0 });
    let angle = |i: usize| -PI / 2.0 + 2.0 * PI * i as f64 / m as f64;
    let at = |i: usize, v: f64| {
        let r = v / scale * radius;
        (cx + r * angle(i).cos(), cy + r * angle(i).sin())
    };

    let mut s = header(820.0, height);
    let _ = writeln!(s, "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>", num(cx), escape(&spec.title));
    for q in 1..=4 {
        let v = scale * q as f64 / 4.0;
        let pts: Vec<String> = (0..=m).map(|i| at(i % m, v)).map(|(x, y)| format!("{},{}", num(x), num(y))).collect();
        let _ = writeln!(s, "<polyline class=\"ring\" points=\"{}\" fill=\"none\" stroke=\"#dddddd\"/>", pts.join(" "));
    }
    for (i, label) in spec.spokes.iter().enumerate() {
        let (x, y) = at(i, scale);
        let _ = writeln!(s, "<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\"/>", num(cx), num(cy), num(x), num(y));
        let (lx, ly) = at(i, scale * 1.08);
        let anchor = if (lx - cx).abs() < 1.0 { "middle" } else if lx > cx { "start" } else { "end" };
        let _ = writeln!(
            s,
            "<text class=\"spoke\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>",
            num(lx),
            num(ly + 4.0),
            escape(label)
        );
    }

    let mut order: Vec<usize> = (0..spec.series.len()).collect();
    let areas: Vec<f64> = spec.series.iter().map(|s| polygon_area(&s.1)).collect();
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]).then(a.cmp(&b)));
    for (pos, &k) in order.iter().enumerate() {
        let (name, values) = &spec.series[k];
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = (0..=m).map(|i| at(i % m, values[i % m])).map(|(x, y)| format!("{},{}", num(x), num(y))).collect();
        let _ = writeln!(
            s,
            "<polyline class=\"series\" data-name=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>",
            escape(name),
            pts.join(" ")
        );
        let y = 60.0 + 18.0 * pos as f64;
        let _ = writeln!(
            s,
            "<g class=\"legend\"><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{colour}\" stroke-width=\"3\"/><text x=\"{}\" y=\"{}\">{}</text></g>",
            num(legend_x),
            num(y),
            num(legend_x + 24.0),
            num(y),
            num(legend_x + 30.0),
            num(y + 4.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_glyph_svg(spec: &GlyphSpec, out: &Path) -> Result<()> {
    write_file(out, &glyph_svg(spec)?)
}

/// One estimator's (estimate, truth) cloud with the subset it would pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPanel {
    pub title: String,
    pub points: Vec<(f64, f64)>,
    /// Chosen subset as (estimate, truth, label).
    pub best: Option<(f64, f64, String)>,
}

/// RESUB, LOO and SLOO panels of a case study.
pub fn case_study_panels(cs: &CaseStudy) -> Vec<ScatterPanel> {
    [EstimateKind::Resub, EstimateKind::Loo, EstimateKind::Sloo]
        .into_iter()
        .map(|k| ScatterPanel {
            title: k.tag().to_string(),
            points: cs.scatter(k),
            best: cs.best_for(k).map(|b| {
                let ranks: Vec<String> = b.ranks.iter().map(usize::to_string).collect();
                (b.predicted.unwrap_or(f64::NAN), b.true_error, format!("{{{}}}", ranks.join(",")))
            }),
        })
        .collect()
}

const PANEL: f64 = 260.0;
const MARGIN: f64 = 50.0;

pub fn scatter_svg(title: &str, panels: &[ScatterPanel]) -> Result<String> {
    if panels.is_empty() || panels.iter().any(|p| p.points.is_empty()) {
        return Err(Error::invalid("scatter plot needs non-empty panels"));
    }
    let max = panels
        .iter()
        .flat_map(|p| p.points.iter().flat_map(|&(a, b)| [a, b]))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let hi = ((max / 0.1).ceil() * 0.1).max(0.1);
    let width = panels.len() as f64 * (PANEL + MARGIN) + MARGIN;
    let mut s = header(width, PANEL + 2.5 * MARGIN);
    let _ = writeln!(s, "<text x=\"{}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">{}</text>", num(width / 2.0), escape(title));
    for (k, p) in panels.iter().enumerate() {
        let x0 = MARGIN + k as f64 * (PANEL + MARGIN);
        let y0 = 1.5 * MARGIN + PANEL;
        let px = |v: f64| x0 + v / hi * PANEL;
        let py = |v: f64| y0 - v / hi * PANEL;
        let _ = writeln!(s, "<g class=\"panel\" data-title=\"{}\">", escape(&p.title));
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>",
            num(x0),
            num(y0 - PANEL),
            num(PANEL),
            num(PANEL)
        );
        let _ = writeln!(
            s,
            "<line class=\"diagonal\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>",
            num(px(0.0)),
            num(py(0.0)),
            num(px(hi)),
            num(py(hi))
        );
        for t in [0.0, hi / 2.0, hi] {
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{t:.2}</text>", num(px(t)), num(y0 + 14.0));
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{t:.2}</text>", num(x0 - 4.0), num(py(t) + 4.0));
        }
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", num(x0 + PANEL / 2.0), num(y0 + 30.0), escape(&p.title));
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">holdout error</text>",
            num(x0 - 34.0),
            num(y0 - PANEL / 2.0),
            num(x0 - 34.0),
            num(y0 - PANEL / 2.0)
        );
        for &(e, t) in &p.points {
            let _ = writeln!(s, "<circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"1.6\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>", num(px(e)), num(py(t)));
        }
        if let Some((e, t, label)) = &p.best {
            if e.is_finite() && t.is_finite() {
                let _ = writeln!(
                    s,
                    "<circle class=\"best\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>",
                    num(px(*e)),
                    num(py(*t))
                );
            }
            let _ = writeln!(
                s,
                "<text class=\"annotation\" x=\"{}\" y=\"{}\" fill=\"#d62728\">best {}: est {e:.4}, true {t:.4}</text>",
                num(x0 + 6.0),
                num(y0 - PANEL + 14.0),
                escape(label)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_scatter_svg(title: &str, panels: &[ScatterPanel], out: &Path) -> Result<()> {
    write_file(out, &scatter_svg(title, panels)?)
}

/// A labelled line of a curve plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line plot, used for sample size against accuracy.
pub fn curve_svg(title: &str, x_label: &str, y_label: &str, series: &[CurveSeries]) -> Result<String> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() || all.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("curve plot needs finite points"));
    }
    let (w, h, m) = (560.0, 360.0, 60.0);
    let xmin = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ymax = all.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-9);
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let px = |x: f64| m + (x - xmin) / xspan * w;
    let py = |y: f64| m + h - y / ymax * h;
    let mut s = header(w + 2.0 * m + 140.0, h + 2.0 * m);
    let _ = writeln!(s, "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>", num(m + w / 2.0), escape(title));
    let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>", num(m), num(m), num(w), num(h));
    for q in 0..=4 {
        let x = xmin + xspan * q as f64 / 4.0;
        let y = ymax * q as f64 / 4.0;
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x:.2}</text>", num(px(x)), num(m + h + 14.0));
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y:.0}</text>", num(m - 4.0), num(py(y) + 4.0));
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", num(m + w / 2.0), num(m + h + 34.0), escape(x_label));
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
        num(m + h / 2.0),
        num(m + h / 2.0),
        escape(y_label)
    );
    for (k, c) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{},{}", num(px(x)), num(py(y)))).collect();
        let _ = writeln!(
            s,
            "<polyline class=\"series\" data-name=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>",
            escape(&c.label),
            pts.join(" ")
        );
        let y = m + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{colour}\" stroke-width=\"3\"/><text x=\"{}\" y=\"{}\">{}</text>",
            num(m + w + 16.0),
            num(y),
            num(m + w + 40.0),
            num(y),
            num(m + w + 46.0),
            num(y + 4.0),
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_curve_svg(title: &str, x_label: &str, y_label: &str, series: &[CurveSeries], out: &Path) -> Result<()> {
    write_file(out, &curve_svg(title, x_label, y_label, series)?)
}
