//! Error estimators: resubstitution, leave-one-out (counting and smoothed),
//! leave-one-out with selection repeated inside every fold, and the
//! holdout error used as ground truth.
//!
//! Counting estimators record 0/1 per tested instance; smoothed ones record
//! `1 - posterior(true class)`. Folds are evaluated and summed in index
//! order so results are bit-reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classifiers::{fit_matrix, ClassifierKind};
use crate::config::Hyperparams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rankers::{rank_features, RankedList, RankerKind};
use crate::selectors::{select, SelectionScheme};
use crate::subset::FeatureSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimateKind {
    #[serde(rename = "RESUB")]
    Resub,
    #[serde(rename = "LOO")]
    Loo,
    #[serde(rename = "SLOO")]
    Sloo,
    #[serde(rename = "RLOO")]
    Rloo,
    #[serde(rename = "HOLDOUT")]
    Holdout,
}

impl EstimateKind {
    pub fn tag(self) -> &'static str {
        match self {
            EstimateKind::Resub => "RESUB",
            EstimateKind::Loo => "LOO",
            EstimateKind::Sloo => "SLOO",
            EstimateKind::Rloo => "RLOO",
            EstimateKind::Holdout => "HOLDOUT",
        }
    }
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    /// Model trainings consumed; for `RLOO`, subset evaluations requested
    /// by the selection runs (one per fold plus the final one).
    pub n_evaluations: usize,
}

fn loss(p: &[f64], truth: usize, smoothed: bool) -> f64 {
    if smoothed {
        1.0 - p[truth]
    } else if crate::classifiers::argmax(p) == truth {
        0.0
    } else {
        1.0
    }
}

/// Leave-one-out on an already projected matrix.
pub(crate) fn loo_on_matrix(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    seed: u64,
    smoothed: bool,
) -> f64 {
    let n = x.n_rows();
    let mut total = 0.0;
    for i in 0..n {
        let xt = x.without_row(i);
        let mut yt = y.to_vec();
        yt.remove(i);
        let model = fit_matrix(kind, hyper, &xt, &yt, n_classes, seed);
        total += loss(&model.posterior(x.row(i)), y[i], smoothed);
    }
    total / n as f64
}

/// Columns of `subset` in ascending index order. Estimates depend only on
/// subset membership, never on the order its members were listed in.
pub(crate) fn project_sorted(data: &Dataset, subset: &FeatureSubset) -> Result<Matrix> {
    data.project(&FeatureSubset::new(subset.key()))
}

fn check_loo(probe: &Dataset) -> Result<()> {
    if probe.n_instances() < 2 {
        return Err(Error::InvalidDataset(
            "leave-one-out needs at least two instances".into(),
        ));
    }
    Ok(())
}

/// Error of the model trained on the whole probe, measured on the probe.
pub fn resubstitution_error(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    subset: &FeatureSubset,
    seed: u64,
) -> Result<ErrorEstimate> {
    let x = project_sorted(probe, subset)?;
    let model = fit_matrix(kind, hyper, &x, probe.labels(), probe.n_classes(), seed);
    let wrong: f64 = (0..x.n_rows())
        .map(|i| loss(&model.posterior(x.row(i)), probe.labels()[i], false))
        .sum();
    Ok(ErrorEstimate {
        value: wrong / x.n_rows() as f64,
        kind: EstimateKind::Resub,
        n_evaluations: 1,
    })
}

/// Leave-one-out error: counting (`LOO`) or smoothed (`SLOO`).
///
/// A fold whose training part lacks a class is trained on the classes that
/// remain; it cannot predict the held-out class.
pub fn loo_error(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    subset: &FeatureSubset,
    seed: u64,
    smoothed: bool,
) -> Result<ErrorEstimate> {
    check_loo(probe)?;
    let x = project_sorted(probe, subset)?;
    let value = loo_on_matrix(kind, hyper, &x, probe.labels(), probe.n_classes(), seed, smoothed);
    Ok(ErrorEstimate {
        value,
        kind: if smoothed {
            EstimateKind::Sloo
        } else {
            EstimateKind::Loo
        },
        n_evaluations: probe.n_instances(),
    })
}

/// Output of [`proper_rloo_error`].
#[derive(Debug, Clone)]
pub struct RlooOutcome {
    pub estimate: ErrorEstimate,
    /// Subset selected on the whole probe.
    pub subset: FeatureSubset,
    /// Subset chosen inside each fold, in fold order.
    pub fold_subsets: Vec<FeatureSubset>,
}

fn ranking_for(
    ranker: Option<RankerKind>,
    scheme: SelectionScheme,
    hyper: &Hyperparams,
    data: &Dataset,
    seed: u64,
) -> Result<RankedList> {
    match ranker {
        Some(r) if scheme != SelectionScheme::All => rank_features(r, hyper, data, seed),
        _ if scheme == SelectionScheme::All => Ok(RankedList::from_scores(&vec![0.0; data.n_features()])),
        _ => Err(Error::invalid(format!("scheme {scheme} needs a ranker"))),
    }
}

/// Leave-one-out over the whole pipeline: each fold ranks and selects on
/// its training part only, and the counting error on the held-out instance
/// is averaged. The returned subset is re-selected on the full probe.
pub fn proper_rloo_error(
    kind: ClassifierKind,
    ranker: Option<RankerKind>,
    scheme: SelectionScheme,
    hyper: &Hyperparams,
    probe: &Dataset,
    seed: u64,
) -> Result<RlooOutcome> {
    check_loo(probe)?;
    let n = probe.n_instances();
    let mut wrong = 0.0;
    let mut evaluations = 0;
    let mut fold_subsets = Vec::with_capacity(n);
    for i in 0..n {
        let train = probe.without_row(i);
        let ranked = ranking_for(ranker, scheme, hyper, &train, seed)?;
        let sel = select(scheme, &ranked, kind, hyper, &train, seed)?;
        evaluations += sel.evaluations;
        let xt = project_sorted(&train, &sel.subset)?;
        let model = fit_matrix(kind, hyper, &xt, train.labels(), probe.n_classes(), seed);
        let q: Vec<f64> = sel.subset.key().iter().map(|&f| probe.row(i)[f]).collect();
        wrong += loss(&model.posterior(&q), probe.labels()[i], false);
        fold_subsets.push(sel.subset);
    }
    let ranked = ranking_for(ranker, scheme, hyper, probe, seed)?;
    let final_sel = select(scheme, &ranked, kind, hyper, probe, seed)?;
    evaluations += final_sel.evaluations;
    Ok(RlooOutcome {
        estimate: ErrorEstimate {
            value: wrong / n as f64,
            kind: EstimateKind::Rloo,
            n_evaluations: evaluations,
        },
        subset: final_sel.subset,
        fold_subsets,
    })
}

/// Counting error on `holdout` of the model trained on `probe`.
pub fn holdout_true_error(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    subset: &FeatureSubset,
    holdout: &Dataset,
    seed: u64,
) -> Result<ErrorEstimate> {
    if holdout.n_instances() == 0 {
        return Err(Error::InvalidDataset("empty holdout set".into()));
    }
    if holdout.class_names() != probe.class_names() {
        return Err(Error::InvalidDataset(
            "holdout and probe have different class lists".into(),
        ));
    }
    let x = project_sorted(probe, subset)?;
    let model = fit_matrix(kind, hyper, &x, probe.labels(), probe.n_classes(), seed);
    let hx = project_sorted(holdout, subset)?;
    let wrong: f64 = (0..hx.n_rows())
        .map(|i| loss(&model.posterior(hx.row(i)), holdout.labels()[i], false))
        .sum();
    Ok(ErrorEstimate {
        value: wrong / hx.n_rows() as f64,
        kind: EstimateKind::Holdout,
        n_evaluations: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::{generate_classifier_dependent_pair, DependenceMode, GaussianProblem};
    use proptest::prelude::*;

    fn ds(rows: Vec<Vec<f64>>, labels: &[&str]) -> Dataset {
        let names = (0..rows[0].len()).map(|i| format!("f{i}")).collect();
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        Dataset::from_labelled_rows("t", Matrix::from_rows(&rows), &labels, names).unwrap()
    }

    fn h() -> Hyperparams {
        Hyperparams {
            rf_trees: 15,
            rf_imp_trees: 15,
            ..Hyperparams::default()
        }
    }

    #[test]
    fn resub_1nn_distinct_points_is_zero() {
        let d = GaussianProblem::new(5, 3, 2, 1.0).generate("g", 1);
        let e = resubstitution_error(ClassifierKind::Nn1, &h(), &d, &FeatureSubset::all(3), 0).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.kind, EstimateKind::Resub);
    }

    #[test]
    fn resub_prior_model_balanced_is_half() {
        let d = GaussianProblem::new(5, 3, 2, 1.0).generate("g", 1);
        for k in ClassifierKind::ALL {
            let e = resubstitution_error(k, &h(), &d, &FeatureSubset::empty(), 0).unwrap();
            assert_eq!(e.value, 0.5, "{k}");
        }
    }

    // Folds by hand: leaving out -2 leaves -1 as nearest A; leaving out -1
    // leaves -2 (distance 1) vs +1 (distance 2); symmetric for B.
    #[test]
    fn loo_1nn_four_points() {
        let d = ds(vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]], &["A", "A", "B", "B"]);
        let e = loo_error(ClassifierKind::Nn1, &h(), &d, &FeatureSubset::all(1), 0, false).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.n_evaluations, 4);
    }

    #[test]
    fn fig3_patterns() {
        for seed in 0..20 {
            let a = generate_classifier_dependent_pair(DependenceMode::LdcWins, seed);
            let all = FeatureSubset::all(2);
            let ldc = loo_error(ClassifierKind::Ldc, &h(), &a, &all, 0, false).unwrap().value;
            let nn = loo_error(ClassifierKind::Nn1, &h(), &a, &all, 0, false).unwrap().value;
            assert_eq!((ldc, nn), (0.0, 1.0), "ldc-wins seed {seed}");
            let b = generate_classifier_dependent_pair(DependenceMode::NnWins, seed);
            let ldc = loo_error(ClassifierKind::Ldc, &h(), &b, &all, 0, false).unwrap().value;
            let nn = loo_error(ClassifierKind::Nn1, &h(), &b, &all, 0, false).unwrap().value;
            assert_eq!((ldc, nn), (1.0, 0.0), "nn-wins seed {seed}");
        }
    }

    #[test]
    fn holdout_constant_predictor() {
        // probe has one class only in effect: a single-class model
        let probe = ds(vec![vec![0.0], vec![1.0], vec![5.0]], &["A", "A", "B"]);
        let probe = probe.subset_rows(&[0, 1]);
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let mut labels = vec!["A"; 7];
        labels.extend(["B"; 3]);
        let hold = ds(rows, &labels);
        let e = holdout_true_error(ClassifierKind::Ldc, &h(), &probe, &FeatureSubset::all(1), &hold, 0).unwrap();
        assert!((e.value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn holdout_on_probe_equals_resub() {
        let d = GaussianProblem::new(6, 4, 2, 1.0).generate("g", 3);
        let s = FeatureSubset::all(4);
        for k in ClassifierKind::ALL {
            let a = holdout_true_error(k, &h(), &d, &s, &d, 5).unwrap().value;
            let b = resubstitution_error(k, &h(), &d, &s, 5).unwrap().value;
            assert_eq!(a, b, "{k}");
        }
    }

    #[test]
    fn rloo_all_equals_counting_loo() {
        let d = GaussianProblem::new(6, 5, 2, 1.0).generate("g", 8);
        let r = proper_rloo_error(ClassifierKind::Ldc, None, SelectionScheme::All, &h(), &d, 0).unwrap();
        let l = loo_error(ClassifierKind::Ldc, &h(), &d, &FeatureSubset::all(5), 0, false).unwrap();
        assert_eq!(r.estimate.value, l.value);
        assert_eq!(r.estimate.n_evaluations, d.n_instances() + 1);
        assert_eq!(r.subset, FeatureSubset::all(5));
    }

    #[test]
    fn rloo_collapses_when_folds_agree() {
        // one overwhelming feature: every fold's SU top-3 is the same set
        let d = GaussianProblem::new(6, 20, 3, 8.0).generate("g", 2);
        let r = proper_rloo_error(ClassifierKind::Ldc, Some(RankerKind::Su), SelectionScheme::Top3, &h(), &d, 0)
            .unwrap();
        if r.fold_subsets.iter().all(|s| *s == r.fold_subsets[0]) {
            let l = loo_error(ClassifierKind::Ldc, &h(), &d, &r.fold_subsets[0], 0, false).unwrap();
            assert_eq!(r.estimate.value, l.value);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn estimates_bounded_and_svm_smoothing_is_counting(seed in 0u64..500) {
            let d = GaussianProblem::new(5, 4, 2, 1.0).generate("g", seed);
            let s = FeatureSubset::all(4);
            for k in ClassifierKind::ALL {
                let c = loo_error(k, &h(), &d, &s, seed, false).unwrap().value;
                let sm = loo_error(k, &h(), &d, &s, seed, true).unwrap().value;
                prop_assert!((0.0..=1.0).contains(&c) && (0.0..=1.0).contains(&sm));
                prop_assert!((c * 10.0 - (c * 10.0).round()).abs() < 1e-9);
                if k.has_discrete_posteriors() {
                    prop_assert_eq!(c, sm);
                }
            }
        }
    }
}
