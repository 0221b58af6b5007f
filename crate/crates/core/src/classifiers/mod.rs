//! The seven classifier kinds and their posterior-probability conventions.
//!
//! | kind | posterior |
//! |------|-----------|
//! | `NN1`  | softmax of negated per-class nearest distances |
//! | `DT`   | class distribution of the training instances in the leaf |
//! | `LDC`  | Bayes' rule on Gaussians with a shared (ridge-shrunk) covariance |
//! | `NB`   | product of per-feature normal densities, normalised |
//! | `RF`   | mean of the trees' leaf distributions |
//! | `SVMG`, `SVML` | discrete: one-hot on the predicted class |
//!
//! Training data is put into a canonical row order before fitting, so a
//! model never depends on how the rows of its training set were ordered.
//! An empty feature subset yields a prior-only model.

mod forest;
mod ldc;
mod nb;
mod nn;
pub(crate) mod svm;
pub(crate) mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Hyperparams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{cmp_rows, Matrix};
use crate::subset::FeatureSubset;

pub(crate) use forest::Forest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "NN1")]
    Nn1,
    #[serde(rename = "DT")]
    Dt,
    #[serde(rename = "LDC")]
    Ldc,
    #[serde(rename = "NB")]
    Nb,
    #[serde(rename = "RF")]
    Rf,
    #[serde(rename = "SVMG")]
    Svmg,
    #[serde(rename = "SVML")]
    Svml,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 7] = [
        ClassifierKind::Nn1,
        ClassifierKind::Dt,
        ClassifierKind::Ldc,
        ClassifierKind::Nb,
        ClassifierKind::Rf,
        ClassifierKind::Svmg,
        ClassifierKind::Svml,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ClassifierKind::Nn1 => "NN1",
            ClassifierKind::Dt => "DT",
            ClassifierKind::Ldc => "LDC",
            ClassifierKind::Nb => "NB",
            ClassifierKind::Rf => "RF",
            ClassifierKind::Svmg => "SVMG",
            ClassifierKind::Svml => "SVML",
        }
    }

    /// Whether posteriors are restricted to {0, 1}.
    pub fn has_discrete_posteriors(self) -> bool {
        matches!(self, ClassifierKind::Svmg | ClassifierKind::Svml)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, ClassifierKind::Rf)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        match up.as_str() {
            "NN1" | "1NN" | "NN" => Ok(ClassifierKind::Nn1),
            _ => ClassifierKind::ALL
                .into_iter()
                .find(|k| k.tag() == up)
                .ok_or_else(|| Error::invalid(format!("unknown classifier {s:?}"))),
        }
    }
}

/// Per-class probabilities, ordered like the model's class list.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorVector(Vec<f64>);

impl PosteriorVector {
    pub(crate) fn new(p: Vec<f64>) -> Self {
        debug_assert!(
            (p.iter().sum::<f64>() - 1.0).abs() < 1e-9,
            "posterior does not sum to 1: {p:?}"
        );
        PosteriorVector(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, class: usize) -> f64 {
        self.0[class]
    }

    /// Most probable class; ties go to the lower class index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// Turns log-scores into probabilities. Classes flagged absent get 0.
pub(crate) fn softmax_present(scores: &[f64], present: &[bool]) -> Vec<f64> {
    let max = scores
        .iter()
        .zip(present)
        .filter(|(_, &p)| p)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = scores
        .iter()
        .zip(present)
        .map(|(&s, &p)| if p { (s - max).exp() } else { 0.0 })
        .collect();
    let z: f64 = out.iter().sum();
    for v in &mut out {
        *v /= z;
    }
    out
}

pub(crate) fn one_hot(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

#[derive(Debug, Clone)]
pub(crate) enum Fitted {
    Prior(Vec<f64>),
    Nn(nn::NearestNeighbour),
    Tree(tree::Tree),
    Ldc(ldc::Ldc),
    Nb(nb::NaiveBayes),
    Forest(Forest),
    Svm(svm::SvmClassifier),
}

impl Fitted {
    pub(crate) fn posterior(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Fitted::Prior(p) => p.clone(),
            Fitted::Nn(m) => m.posterior(x),
            Fitted::Tree(m) => m.posterior(x),
            Fitted::Ldc(m) => m.posterior(x),
            Fitted::Nb(m) => m.posterior(x),
            Fitted::Forest(m) => m.posterior(x),
            Fitted::Svm(m) => m.posterior(x),
        }
    }
}

/// Indices of training rows sorted by (label, feature values).
pub(crate) fn canonical_order(x: &Matrix, y: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.n_rows()).collect();
    idx.sort_by(|&a, &b| y[a].cmp(&y[b]).then_with(|| cmp_rows(x.row(a), x.row(b))));
    idx
}

pub(crate) fn class_priors(y: &[usize], n_classes: usize) -> Vec<f64> {
    let mut p = vec![0.0; n_classes];
    for &l in y {
        p[l] += 1.0;
    }
    let n = y.len() as f64;
    for v in &mut p {
        *v /= n;
    }
    p
}

/// Fits a model on an already projected matrix.
pub(crate) fn fit_matrix(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    seed: u64,
) -> Fitted {
    assert_eq!(x.n_rows(), y.len());
    assert!(!y.is_empty(), "cannot train on zero instances");
    let order = canonical_order(x, y);
    let x = x.select_rows(&order);
    let y: Vec<usize> = order.iter().map(|&i| y[i]).collect();
    let priors = class_priors(&y, n_classes);
    let present: Vec<bool> = priors.iter().map(|&p| p > 0.0).collect();
    if present.iter().filter(|&&p| p).count() == 1 {
        let only = present.iter().position(|&p| p).unwrap();
        return Fitted::Prior(one_hot(n_classes, only));
    }
    if x.n_cols() == 0 {
        return if kind.has_discrete_posteriors() {
            Fitted::Prior(one_hot(n_classes, argmax(&priors)))
        } else {
            Fitted::Prior(priors)
        };
    }
    match kind {
        ClassifierKind::Nn1 => Fitted::Nn(nn::NearestNeighbour::fit(x, y, n_classes)),
        ClassifierKind::Dt => Fitted::Tree(tree::Tree::fit(
            &x,
            &y,
            n_classes,
            &(0..x.n_rows()).collect::<Vec<_>>(),
            &tree::TreeParams {
                min_split: hyper.dt_min_split,
                max_features: None,
            },
            None,
            None,
        )),
        ClassifierKind::Ldc => Fitted::Ldc(ldc::Ldc::fit(&x, &y, n_classes, hyper.ldc_ridge)),
        ClassifierKind::Nb => Fitted::Nb(nb::NaiveBayes::fit(&x, &y, n_classes, hyper.nb_var_floor)),
        ClassifierKind::Rf => Fitted::Forest(Forest::fit(
            &x,
            &y,
            n_classes,
            hyper.rf_trees,
            hyper.dt_min_split,
            seed,
            None,
        )),
        ClassifierKind::Svmg => {
            let gamma = if hyper.svm_gamma > 0.0 {
                hyper.svm_gamma
            } else {
                1.0 / x.n_cols() as f64
            };
            Fitted::Svm(svm::SvmClassifier::fit(
                x,
                &y,
                n_classes,
                svm::Kernel::Rbf { gamma },
                hyper,
            ))
        }
        ClassifierKind::Svml => Fitted::Svm(svm::SvmClassifier::fit(
            x,
            &y,
            n_classes,
            svm::Kernel::Linear,
            hyper,
        )),
    }
}

/// A classifier fitted on one feature subset of a dataset.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    kind: ClassifierKind,
    subset: FeatureSubset,
    class_names: Vec<String>,
    fitted: Fitted,
}

/// Fits `kind` on the subset's columns of `data`.
///
/// An empty subset is legal and produces the prior-only model (for the SVM
/// kinds, a constant vote for the majority class).
pub fn train(
    kind: ClassifierKind,
    hyper: &Hyperparams,
    data: &Dataset,
    subset: &FeatureSubset,
    seed: u64,
) -> Result<TrainedModel> {
    let x = data.project(subset)?;
    Ok(TrainedModel {
        kind,
        subset: subset.clone(),
        class_names: data.class_names().to_vec(),
        fitted: fit_matrix(kind, hyper, &x, data.labels(), data.n_classes(), seed),
    })
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn subset(&self) -> &FeatureSubset {
        &self.subset
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Posterior for an instance given in subset coordinates (one value per
    /// subset feature, in subset order).
    pub fn predict_proba(&self, instance: &[f64]) -> Result<PosteriorVector> {
        if instance.len() != self.subset.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subset.len(),
                got: instance.len(),
            });
        }
        Ok(PosteriorVector::new(self.fitted.posterior(instance)))
    }

    pub fn predict_label(&self, instance: &[f64]) -> Result<usize> {
        Ok(self.predict_proba(instance)?.argmax())
    }

    /// Posterior for a full-width row of the original dataset.
    pub fn predict_proba_row(&self, row: &[f64]) -> Result<PosteriorVector> {
        let x: Vec<f64> = self.subset.indices().iter().map(|&i| row[i]).collect();
        self.predict_proba(&x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[Vec<f64>], labels: &[&str]) -> Dataset {
        let names = (0..rows[0].len()).map(|i| format!("f{i}")).collect();
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        Dataset::from_labelled_rows("t", Matrix::from_rows(rows), &labels, names).unwrap()
    }

    #[test]
    fn tags_round_trip() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.tag().parse::<ClassifierKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.tag()));
        }
        assert_eq!("1nn".parse::<ClassifierKind>().unwrap(), ClassifierKind::Nn1);
        assert!("knn".parse::<ClassifierKind>().is_err());
    }

    #[test]
    fn ldc_symmetric_singletons_threshold_zero() {
        let d = ds(&[vec![-1.0], vec![1.0]], &["a", "b"]);
        let m = train(ClassifierKind::Ldc, &Hyperparams::default(), &d, &FeatureSubset::all(1), 0).unwrap();
        let p = m.predict_proba(&[0.0]).unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-12);
        assert_eq!(m.predict_label(&[-1e-3]).unwrap(), 0);
        assert_eq!(m.predict_label(&[1e-3]).unwrap(), 1);
    }

    #[test]
    fn ldc_midpoint_of_symmetric_classes() {
        let d = ds(
            &[vec![-2.0, 0.5], vec![-1.0, -0.5], vec![1.0, 0.5], vec![2.0, -0.5]],
            &["a", "a", "b", "b"],
        );
        let m = train(ClassifierKind::Ldc, &Hyperparams::default(), &d, &FeatureSubset::all(2), 0).unwrap();
        let p = m.predict_proba(&[0.0, 0.0]).unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn empty_subset_gives_priors() {
        let d = ds(&[vec![0.0], vec![1.0], vec![2.0]], &["a", "a", "b"]);
        for k in ClassifierKind::ALL {
            let m = train(k, &Hyperparams::default(), &d, &FeatureSubset::empty(), 0).unwrap();
            let p = m.predict_proba(&[]).unwrap();
            if k.has_discrete_posteriors() {
                assert_eq!(p.probabilities(), &[1.0, 0.0]);
            } else {
                assert!((p.get(0) - 2.0 / 3.0).abs() < 1e-12, "{k}");
            }
        }
    }

    #[test]
    fn svm_posteriors_discrete() {
        let d = ds(
            &[vec![0.0, 1.0], vec![0.5, 0.2], vec![2.0, 2.0], vec![2.5, 1.5]],
            &["a", "a", "b", "b"],
        );
        for k in [ClassifierKind::Svml, ClassifierKind::Svmg] {
            let m = train(k, &Hyperparams::default(), &d, &FeatureSubset::all(2), 0).unwrap();
            for q in [[0.1, 0.1], [1.2, 1.3], [3.0, 3.0], [-4.0, 9.0]] {
                let p = m.predict_proba(&q).unwrap();
                assert!(p.probabilities() == [1.0, 0.0] || p.probabilities() == [0.0, 1.0]);
            }
        }
    }

    #[test]
    fn nn_softmax_on_three_points() {
        // Query at (0,0) coincides with the only A point; B points at distance 10 and 12.
        let d = ds(&[vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 12.0]], &["A", "B", "B"]);
        let m = train(ClassifierKind::Nn1, &Hyperparams::default(), &d, &FeatureSubset::all(2), 0).unwrap();
        let p = m.predict_proba(&[0.0, 0.0]).unwrap();
        // exp(0) / (exp(0) + exp(-10))
        let expected = 1.0 / (1.0 + (-10f64).exp());
        assert!((p.get(0) - expected).abs() < 1e-12);
        assert!(p.get(0) > 0.9);
    }

    #[test]
    fn argmax_ties_to_lower_index() {
        assert_eq!(PosteriorVector::new(vec![0.7, 0.3]).argmax(), 0);
        assert_eq!(PosteriorVector::new(vec![0.5, 0.5]).argmax(), 0);
        assert_eq!(PosteriorVector::new(vec![0.2, 0.8]).argmax(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let d = ds(&[vec![0.0, 1.0], vec![1.0, 0.0]], &["a", "b"]);
        let m = train(ClassifierKind::Nb, &Hyperparams::default(), &d, &FeatureSubset::all(2), 0).unwrap();
        assert!(matches!(
            m.predict_proba(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rf_deterministic_for_seed() {
        let d = ds(
            &[vec![0.0, 1.0], vec![0.5, 0.2], vec![0.4, 0.9], vec![2.0, 2.0], vec![2.5, 1.5], vec![1.9, 2.2]],
            &["a", "a", "a", "b", "b", "b"],
        );
        let h = Hyperparams::default();
        let a = train(ClassifierKind::Rf, &h, &d, &FeatureSubset::all(2), 11).unwrap();
        let b = train(ClassifierKind::Rf, &h, &d, &FeatureSubset::all(2), 11).unwrap();
        for q in [[0.3, 0.4], [1.2, 1.1], [2.2, 1.8]] {
            assert_eq!(a.predict_proba(&q).unwrap(), b.predict_proba(&q).unwrap());
        }
    }

    #[test]
    fn single_class_training_predicts_that_class() {
        let d = ds(&[vec![0.0], vec![1.0], vec![2.0]], &["a", "a", "b"]);
        let only_a = d.subset_rows(&[0, 1]);
        for k in ClassifierKind::ALL {
            let m = train(k, &Hyperparams::default(), &only_a, &FeatureSubset::all(1), 0).unwrap();
            assert_eq!(m.predict_label(&[5.0]).unwrap(), 0);
        }
    }
}
