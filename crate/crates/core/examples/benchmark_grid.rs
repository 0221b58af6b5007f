//! A small benchmark grid on two synthetic datasets, persisted as JSON
//! lines with a CSV twin, then resumed.

use fsaudit::classifiers::ClassifierKind;
use fsaudit::dataset::synth::GaussianProblem;
use fsaudit::harness::{csv_path_for, run_grid_to_file, GridConfig};
use fsaudit::rankers::RankerKind;
use fsaudit::selectors::SelectionScheme;

fn main() -> fsaudit::Result<()> {
    let datasets = vec![
        GaussianProblem::new(20, 40, 4, 1.0).generate("gauss_a", 1),
        GaussianProblem::new(25, 60, 6, 0.8).generate("gauss_b", 2),
    ];
    let config = GridConfig {
        runs: 2,
        classifiers: vec![ClassifierKind::Ldc, ClassifierKind::Nn1, ClassifierKind::Nb],
        rankers: vec![RankerKind::Su, RankerKind::Relieff],
        selectors: vec![SelectionScheme::All, SelectionScheme::Top3, SelectionScheme::Top10, SelectionScheme::Best3],
        ..GridConfig::default()
    };
    println!("{} records per dataset", config.records_per_dataset());

    let out = std::env::temp_dir().join("fsaudit_example_grid.jsonl");
    let first = run_grid_to_file(&config, &datasets, &out, false)?;
    let again = run_grid_to_file(&config, &datasets, &out, true)?;
    println!("computed {}, then resumed with {} kept and {} new", first.computed, again.skipped, again.computed);
    println!("results: {} and {}", out.display(), csv_path_for(&out).display());
    Ok(())
}
