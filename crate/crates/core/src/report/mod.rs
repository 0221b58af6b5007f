//! Deterministic HTML, CSV and SVG artifacts: colour-coded rank tables,
//! glyph (radar) plots, estimate-versus-truth scatter panels and
//! sample-size curves. Every emitter is a pure function of its input and
//! writes fixed-precision numbers, so equal input gives equal bytes.

mod svg;
mod table;

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seed::fnv1a;

pub use svg::{
    case_study_panels, glyph_svg, scatter_svg, curve_svg, emit_curve_svg, emit_glyph_svg,
    emit_scatter_svg, polygon_area, CurveSeries, GlyphSpec, ScatterPanel,
};
pub use table::{
    combination_csv, emit_rank_table, rank_color, rank_table_csv, rank_table_html,
};

/// `figure-<hash>.ext`, the hash taken over the resolved configuration text.
pub fn artifact_name(figure: &str, config: &str, ext: &str) -> String {
    format!("{figure}-{:08x}.{ext}", fnv1a(config.as_bytes()) & 0xffff_ffff)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Two-decimal coordinate without a negative zero.
pub(crate) fn num(v: f64) -> String {
    let mut s = String::new();
    let r = (v * 100.0).round() / 100.0;
    let _ = write!(s, "{:.2}", if r == 0.0 { 0.0 } else { r });
    s
}
