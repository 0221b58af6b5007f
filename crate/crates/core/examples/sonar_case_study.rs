//! All 1023 subsets of the SU top 10 on a sonar probe, scored by LDC with
//! four estimators. Writes the scatter plot to the directory given as the
//! first argument (default: the system temp dir).

use std::path::{Path, PathBuf};

use fsaudit::config::Hyperparams;
use fsaudit::dataset::{load_csv, LabelColumn};
use fsaudit::harness::sonar_case_study;
use fsaudit::report::{case_study_panels, emit_scatter_svg};
use fsaudit::stats::pearson;

fn main() -> fsaudit::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let sonar = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sonar.csv"), &LabelColumn::Last)?;
    let cs = sonar_case_study(&sonar, &Hyperparams::default(), 1)?;

    println!("SU top 10: {:?}", cs.top10);
    println!("{:<8} {:<22} {:>9} {:>9}", "", "ranks", "estimate", "holdout");
    for b in &cs.best {
        let est = b.predicted.map_or("-".into(), |p| format!("{p:.4}"));
        println!("{:<8} {:<22} {est:>9} {:>9.4}", b.estimator.tag(), format!("{:?}", b.ranks), b.true_error);
    }
    let sloo: Vec<f64> = cs.rows.iter().map(|r| r.sloo).collect();
    let truth: Vec<f64> = cs.rows.iter().map(|r| r.true_error).collect();
    println!("Pearson(SLOO, holdout) over {} subsets: {:.3}", cs.rows.len(), pearson(&sloo, &truth));

    let svg = out.join("sonar_case_study.svg");
    emit_scatter_svg("sonar, LDC on SU top 10", &case_study_panels(&cs), &svg)?;
    println!("scatter plot: {}", svg.display());
    Ok(())
}
