//! Resubstitution and LOO after selection look good; redoing the selection
//! inside every fold tells the truth.

use fsaudit::classifiers::ClassifierKind;
use fsaudit::config::Hyperparams;
use fsaudit::dataset::synth::GaussianProblem;
use fsaudit::estimators::{holdout_true_error, loo_error, proper_rloo_error, resubstitution_error};
use fsaudit::rankers::RankerKind;
use fsaudit::selectors::SelectionScheme;

fn main() -> fsaudit::Result<()> {
    let h = Hyperparams::default();
    let kind = ClassifierKind::Nb;
    // 20 features, 3 of them informative; a large independent test set.
    let problem = GaussianProblem::new(10, 20, 3, 1.0);
    let test = GaussianProblem::new(500, 20, 3, 1.0).generate("test", 99);
    let runs = 10;
    let mut sums = [0.0; 4];
    for s in 0..runs {
        let probe = problem.generate("probe", s);
        let r = proper_rloo_error(kind, Some(RankerKind::Su), SelectionScheme::Best3, &h, &probe, s)?;
        sums[0] += resubstitution_error(kind, &h, &probe, &r.subset, s)?.value;
        sums[1] += loo_error(kind, &h, &probe, &r.subset, s, false)?.value;
        sums[2] += r.estimate.value;
        sums[3] += holdout_true_error(kind, &h, &probe, &r.subset, &test, s)?.value;
    }
    let names = ["resubstitution", "LOO after selection", "r-LOO", "test error"];
    for (n, v) in names.iter().zip(sums) {
        println!("{n:<20} {:.3}", v / runs as f64);
    }
    Ok(())
}
