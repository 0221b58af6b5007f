//! Rank the sonar features on a 10-per-class probe with every ranker, then
//! let each selection scheme pick a subset for LDC.

use std::path::Path;

use fsaudit::classifiers::ClassifierKind;
use fsaudit::config::Hyperparams;
use fsaudit::dataset::{load_csv, stratified_split, LabelColumn};
use fsaudit::estimators::holdout_true_error;
use fsaudit::rankers::{rank_features, RankerKind};
use fsaudit::selectors::{select, SelectionScheme};

fn main() -> fsaudit::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sonar.csv");
    let sonar = load_csv(path, &LabelColumn::Last)?;
    let seed = 4;
    let split = stratified_split(&sonar, 10, seed)?;
    let h = Hyperparams::default();

    for kind in RankerKind::ALL {
        let ranked = rank_features(kind, &h, &split.probe, seed)?;
        let top: Vec<usize> = ranked.features()[..5].to_vec();
        println!("{:<8} top 5 {top:?}", kind.tag());
    }

    let ranked = rank_features(RankerKind::Relieff, &h, &split.probe, seed)?;
    println!("\nLDC on the ReliefF ranking");
    for scheme in SelectionScheme::ALL_SCHEMES {
        let r = select(scheme, &ranked, ClassifierKind::Ldc, &h, &split.probe, seed)?;
        let truth = holdout_true_error(ClassifierKind::Ldc, &h, &split.probe, &r.subset, &split.holdout, seed)?;
        println!(
            "  {:<6} |S| = {:>2}  criterion {:.3}  holdout {:.3}  ({} evaluations)",
            scheme.tag(),
            r.subset.len(),
            r.criterion.value,
            truth.value,
            r.evaluations
        );
    }
    Ok(())
}
