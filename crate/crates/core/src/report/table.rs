use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use super::{escape, write_file};
use crate::error::Result;
use crate::stats::{CombinationRanking, RankTable};

const RED: (f64, f64, f64) = (255.0, 0.0, 0.0);
const WHITE: (f64, f64, f64) = (255.0, 255.0, 255.0);
const BLUE: (f64, f64, f64) = (0.0, 0.0, 255.0);

/// Colour of `rank` within `[lo, hi]`: red at `lo`, white halfway, blue at
/// `hi`. A degenerate range gives white.
pub fn rank_color(rank: f64, lo: f64, hi: f64) -> String {
    let t = if hi > lo { ((rank - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let (a, b, u) = if t <= 0.5 { (RED, WHITE, t * 2.0) } else { (WHITE, BLUE, t * 2.0 - 1.0) };
    let mix = |x: f64, y: f64| (x + (y - x) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Self-contained HTML table: one row per (classifier, ranker), one column
/// per selector, cells shaded over the row's rank range and members of the
/// best group boxed.
pub fn rank_table_html(table: &RankTable, title: &str) -> String {
    let mut h = String::new();
    h.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n");
    let _ = writeln!(h, "<title>{}</title>", escape(title));
    h.push_str(
        "<style>\ntable{border-collapse:separate;border-spacing:2px;font-family:sans-serif;font-size:13px}\n\
         th,td{padding:3px 8px;text-align:right}\ntd.best{outline:2px solid #000;outline-offset:-2px;font-weight:bold}\n\
         td.missing{background:#eeeeee}\n</style>\n</head>\n<body>\n",
    );
    let _ = writeln!(h, "<h1>{}</h1>", escape(title));
    let _ = writeln!(
        h,
        "<p>Average ranks (1 = best) by {}; boxed cells are not distinguishable from the best at alpha = {}.</p>",
        match table.metric {
            crate::stats::Metric::TrueError => "holdout error",
            crate::stats::Metric::EstError => "estimated error",
        },
        table.alpha
    );
    h.push_str("<table>\n<thead>\n<tr><th>Classifier</th><th>Ranker</th>");
    for c in &table.columns {
        let _ = write!(h, "<th>{}</th>", c.tag());
    }
    h.push_str("<th>Blocks</th></tr>\n</thead>\n<tbody>\n");
    for row in &table.rows {
        let _ = write!(h, "<tr><th>{}</th><th>{}</th>", row.classifier.tag(), row.ranker.tag());
        let finite: Vec<f64> = row.avg_ranks.iter().copied().filter(|v| v.is_finite()).collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (j, &r) in row.avg_ranks.iter().enumerate() {
            if !r.is_finite() {
                warn!("rank table: missing cell {}/{}/{}", row.classifier.tag(), row.ranker.tag(), table.columns[j].tag());
                h.push_str("<td class=\"missing\"></td>");
                continue;
            }
            let class = if row.best_group.contains(&j) { " class=\"best\"" } else { "" };
            let _ = write!(h, "<td{class} style=\"background:{}\">{r:.2}</td>", rank_color(r, lo, hi));
        }
        let _ = writeln!(h, "<td>{}</td></tr>", row.n_blocks);
    }
    h.push_str("</tbody>\n</table>\n</body>\n</html>\n");
    h
}

/// Plain CSV twin of the rank table.
pub fn rank_table_csv(table: &RankTable) -> String {
    let mut s = String::from("classifier,ranker");
    for c in &table.columns {
        let _ = write!(s, ",{}", c.tag());
    }
    s.push_str(",best_group,n_blocks,friedman_statistic,friedman_p\n");
    for row in &table.rows {
        let _ = write!(s, "{},{}", row.classifier.tag(), row.ranker.tag());
        for r in &row.avg_ranks {
            if r.is_finite() {
                let _ = write!(s, ",{r:.4}");
            } else {
                s.push(',');
            }
        }
        let group: Vec<&str> = row.best_group.iter().map(|&j| table.columns[j].tag()).collect();
        let _ = write!(s, ",{},{}", group.join(" "), row.n_blocks);
        match row.friedman {
            Some(f) => {
                let _ = writeln!(s, ",{:.6},{:.6}", f.statistic, f.p_value);
            }
            None => s.push_str(",,\n"),
        }
    }
    s
}

/// Writes `<stem>.html` and `<stem>.csv` next to each other.
pub fn emit_rank_table(table: &RankTable, title: &str, out_html: &Path) -> Result<()> {
    write_file(out_html, &rank_table_html(table, title))?;
    write_file(&out_html.with_extension("csv"), &rank_table_csv(table))
}

pub fn combination_csv(ranking: &CombinationRanking) -> String {
    let mut s = String::from("position,classifier,ranker,selector,avg_rank\n");
    for (i, r) in ranking.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.4}",
            i + 1,
            r.classifier.tag(),
            r.ranker.map_or("", |k| k.tag()),
            r.selector.tag(),
            r.avg_rank
        );
    }
    s
}
