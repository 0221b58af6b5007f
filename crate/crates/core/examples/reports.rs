//! Glyph plot, colour-coded rank table and sample-size curve, written to
//! the directory given as the first argument (default: the system temp dir).

use std::path::PathBuf;

use fsaudit::classifiers::ClassifierKind;
use fsaudit::dataset::synth::GaussianProblem;
use fsaudit::harness::{run_grid, GridConfig};
use fsaudit::rankers::RankerKind;
use fsaudit::report::{artifact_name, emit_curve_svg, emit_glyph_svg, emit_rank_table, CurveSeries, GlyphSpec};
use fsaudit::samplesize::{linspace_step, sample_size_curve, Agreement};
use fsaudit::selectors::SelectionScheme;
use fsaudit::stats::{factor_ranks, selector_rank_table, Factor, Metric};

fn main() -> fsaudit::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let datasets: Vec<_> = (0..4)
        .map(|i| GaussianProblem::new(15, 25, 2 + i as usize, 0.9).generate(&format!("set{i}"), i))
        .collect();
    let config = GridConfig {
        runs: 2,
        classifiers: vec![ClassifierKind::Ldc, ClassifierKind::Nn1, ClassifierKind::Nb, ClassifierKind::Dt],
        rankers: vec![RankerKind::Su, RankerKind::Relieff],
        selectors: vec![SelectionScheme::All, SelectionScheme::Top3, SelectionScheme::Top10, SelectionScheme::Ex10],
        ..GridConfig::default()
    };
    let records = run_grid(&config, &datasets)?;
    let tag = format!("{config:?}");

    let glyph = GlyphSpec::from_factor_ranks("classifiers", &factor_ranks(&records, Metric::TrueError, Factor::Classifier));
    let glyph_path = out.join(artifact_name("glyph", &tag, "svg"));
    emit_glyph_svg(&glyph, &glyph_path)?;

    let table_path = out.join(artifact_name("ranks", &tag, "html"));
    emit_rank_table(&selector_rank_table(&records, Metric::TrueError, 0.05), "selector ranks", &table_path)?;

    let grid = linspace_step(0.55, 0.95, 0.01);
    let pts = sample_size_curve(&grid, 0.05, &[0.05, 0.01], Agreement::Independent)?;
    let series: Vec<CurveSeries> = [0.05, 0.01]
        .iter()
        .map(|&a| CurveSeries {
            label: format!("alpha {a}"),
            points: pts.iter().filter(|p| p.alpha == a).map(|p| (p.p1, p.n)).collect(),
        })
        .collect();
    let curve_path = out.join(artifact_name("samplesize", "", "svg"));
    emit_curve_svg("required N", "p1", "N", &series, &curve_path)?;

    for p in [glyph_path, table_path.clone(), table_path.with_extension("csv"), curve_path] {
        println!("{}", p.display());
    }
    Ok(())
}
