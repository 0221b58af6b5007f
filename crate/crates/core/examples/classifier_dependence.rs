//! Two features that are useless alone and perfect together, but only for
//! one of two classifiers.

use fsaudit::classifiers::ClassifierKind;
use fsaudit::config::Hyperparams;
use fsaudit::dataset::synth::{generate_classifier_dependent_pair, DependenceMode};
use fsaudit::estimators::loo_error;
use fsaudit::FeatureSubset;

fn main() -> fsaudit::Result<()> {
    let h = Hyperparams::default();
    for mode in [DependenceMode::LdcWins, DependenceMode::NnWins] {
        let d = generate_classifier_dependent_pair(mode, 0);
        println!("{mode} ({} points)", d.n_instances());
        for kind in [ClassifierKind::Ldc, ClassifierKind::Nn1] {
            let pair = loo_error(kind, &h, &d, &FeatureSubset::all(2), 0, false)?.value;
            let x1 = loo_error(kind, &h, &d, &FeatureSubset::new(vec![0]), 0, false)?.value;
            let x2 = loo_error(kind, &h, &d, &FeatureSubset::new(vec![1]), 0, false)?.value;
            println!("  {:<4} LOO pair {pair:.2}  x1 {x1:.2}  x2 {x2:.2}", kind.tag());
        }
    }
    Ok(())
}
