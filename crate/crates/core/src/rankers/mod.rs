//! Feature rankers. Every ranker scores all features of a probe sample and
//! returns a total order, best first, with score ties broken by ascending
//! feature index.
//!
//! Rows are put in a canonical order before scoring, so rankings do not
//! depend on how the probe's rows happen to be ordered.

mod relieff;
mod su;
mod svm_rank;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{canonical_order, Forest};
use crate::config::Hyperparams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::subset::FeatureSubset;

pub use su::{equal_frequency_bins, symmetric_uncertainty};
pub use svm_rank::RfeSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RankerKind {
    #[serde(rename = "SU")]
    Su,
    #[serde(rename = "RF_IMP")]
    RfImp,
    #[serde(rename = "RELIEFF")]
    Relieff,
    #[serde(rename = "SVM_W")]
    SvmW,
    #[serde(rename = "SVM_RFE")]
    SvmRfe,
}

impl RankerKind {
    pub const ALL: [RankerKind; 5] = [
        RankerKind::Su,
        RankerKind::RfImp,
        RankerKind::Relieff,
        RankerKind::SvmW,
        RankerKind::SvmRfe,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RankerKind::Su => "SU",
            RankerKind::RfImp => "RF_IMP",
            RankerKind::Relieff => "RELIEFF",
            RankerKind::SvmW => "SVM_W",
            RankerKind::SvmRfe => "SVM_RFE",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, RankerKind::RfImp)
    }
}

impl fmt::Display for RankerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RankerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase().replace('-', "_");
        match up.as_str() {
            "RF" | "RFIMP" => Ok(RankerKind::RfImp),
            "SVMW" => Ok(RankerKind::SvmW),
            "SVMRFE" => Ok(RankerKind::SvmRfe),
            _ => RankerKind::ALL
                .into_iter()
                .find(|k| k.tag() == up)
                .ok_or_else(|| Error::invalid(format!("unknown ranker {s:?}"))),
        }
    }
}

/// Feature indices ordered best first, each with its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    features: Vec<usize>,
    scores: Vec<f64>,
}

impl RankedList {
    /// Orders features by descending score, ties by ascending index.
    pub fn from_scores(scores: &[f64]) -> Self {
        let mut features: Vec<usize> = (0..scores.len()).collect();
        features.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let scores = features.iter().map(|&f| scores[f]).collect();
        RankedList { features, scores }
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// 0-based rank of a feature.
    pub fn position(&self, feature: usize) -> Option<usize> {
        self.features.iter().position(|&f| f == feature)
    }
}

/// First `k` features of the list, in rank order.
pub fn top_k(list: &RankedList, k: usize) -> Result<FeatureSubset> {
    if k > list.len() {
        return Err(Error::invalid(format!(
            "top_k: asked for {k} features, ranking has {}",
            list.len()
        )));
    }
    Ok(FeatureSubset::new(list.features[..k].to_vec()))
}

fn canonical(probe: &Dataset) -> Result<(Matrix, Vec<usize>)> {
    let present = probe.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::InvalidDataset(format!(
            "cannot rank features of {:?}: only one class present",
            probe.name()
        )));
    }
    let order = canonical_order(probe.features(), probe.labels());
    let x = probe.features().select_rows(&order);
    let y = order.iter().map(|&i| probe.labels()[i]).collect();
    Ok((x, y))
}

/// Ranks every feature of `probe`. `seed` only matters for `RF_IMP`.
pub fn rank_features(
    kind: RankerKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    seed: u64,
) -> Result<RankedList> {
    let (x, y) = canonical(probe)?;
    let n_classes = probe.n_classes();
    let scores = match kind {
        RankerKind::Su => {
            let bins = if hyper.su_bins > 0 {
                hyper.su_bins
            } else {
                (x.n_rows() as f64).sqrt().ceil() as usize
            };
            (0..x.n_cols())
                .map(|j| symmetric_uncertainty(&equal_frequency_bins(&x.column(j), bins), &y))
                .collect()
        }
        RankerKind::Relieff => relieff::relieff(&x, &y, n_classes, hyper.relieff_k),
        RankerKind::RfImp => {
            let mut imp = vec![0.0; x.n_cols()];
            Forest::fit(
                &x,
                &y,
                n_classes,
                hyper.rf_imp_trees,
                hyper.dt_min_split,
                seed,
                Some(&mut imp),
            );
            imp
        }
        RankerKind::SvmW => svm_rank::abs_weights(&svm_rank::standardize(&x), &y, hyper),
        RankerKind::SvmRfe => {
            return rank_svm_rfe(
                hyper,
                probe,
                RfeSchedule::Halving {
                    until: hyper.rfe_halve_until,
                },
            )
        }
    };
    Ok(RankedList::from_scores(&scores))
}

/// SVM-RFE with an explicit elimination schedule. A feature's score is
/// its position in the elimination order, so the last survivor ranks first.
pub fn rank_svm_rfe(hyper: &Hyperparams, probe: &Dataset, schedule: RfeSchedule) -> Result<RankedList> {
    let (x, y) = canonical(probe)?;
    let order = svm_rank::rfe_elimination_order(&svm_rank::standardize(&x), &y, hyper, schedule);
    let mut scores = vec![0.0; x.n_cols()];
    for (t, &f) in order.iter().enumerate() {
        scores[f] = t as f64;
    }
    Ok(RankedList::from_scores(&scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::GaussianProblem;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fast() -> Hyperparams {
        Hyperparams {
            rf_imp_trees: 20,
            ..Hyperparams::default()
        }
    }

    fn ds(rows: Vec<Vec<f64>>, labels: &[usize]) -> Dataset {
        let names = (0..rows[0].len()).map(|i| format!("f{i}")).collect();
        let labels: Vec<String> = labels.iter().map(|l| format!("c{l}")).collect();
        Dataset::from_labelled_rows("t", Matrix::from_rows(&rows), &labels, names).unwrap()
    }

    #[test]
    fn tags_round_trip() {
        for k in RankerKind::ALL {
            assert_eq!(k.tag().parse::<RankerKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.tag()));
        }
        assert!("chi2".parse::<RankerKind>().is_err());
    }

    #[test]
    fn from_scores_orders_with_index_ties() {
        let l = RankedList::from_scores(&[0.5, 0.9, 0.5, 0.1]);
        assert_eq!(l.features(), &[1, 0, 2, 3]);
        assert_eq!(l.scores(), &[0.9, 0.5, 0.5, 0.1]);
    }

    #[test]
    fn top_k_bounds() {
        let l = RankedList::from_scores(&[0.1, 0.3, 0.2]);
        assert_eq!(top_k(&l, 3).unwrap().indices(), &[1, 2, 0]);
        assert!(top_k(&l, 0).unwrap().is_empty());
        assert!(top_k(&l, 4).is_err());
    }

    #[test]
    fn su_label_copy_and_constant() {
        let labels = [0, 1, 0, 1, 0, 1, 1, 0];
        let rows = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| vec![7.0, (i % 3) as f64, l as f64])
            .collect();
        let d = ds(rows, &labels);
        let r = rank_features(RankerKind::Su, &fast(), &d, 0).unwrap();
        assert_eq!(r.features()[0], 2);
        assert!((r.scores()[0] - 1.0).abs() < 1e-12);
        let const_pos = r.position(0).unwrap();
        assert_eq!(r.scores()[const_pos], 0.0);
    }

    #[test]
    fn constant_label_rejected() {
        let d = ds(vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]], &[0, 0, 1, 1]);
        let one = d.subset_rows(&[0, 1]);
        assert!(rank_features(RankerKind::Su, &fast(), &one, 0).is_err());
    }

    // Feature 2 carries the label (separation 10 vs unit noise); the others
    // are noise. Every scoring rule must put it first.
    #[test]
    fn strong_feature_ranked_first_by_all() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand_distr::{Distribution, StandardNormal};
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let rows = labels
            .iter()
            .map(|&l| {
                let mut noise = || -> f64 { StandardNormal.sample(&mut rng) };
                vec![noise(), noise(), 10.0 * l as f64 + noise()]
            })
            .collect();
        let d = ds(rows, &labels);
        for k in RankerKind::ALL {
            let r = rank_features(k, &fast(), &d, 3).unwrap();
            assert_eq!(r.features()[0], 2, "{k}");
        }
    }

    #[test]
    fn rfe_single_chunk_matches_svm_w_top_k() {
        let d = GaussianProblem::new(10, 12, 3, 1.5).generate("g", 5);
        let n = d.n_features();
        let hyper = fast();
        let w = rank_features(RankerKind::SvmW, &hyper, &d, 0).unwrap();
        for k in [1, 3, 5] {
            let rfe = rank_svm_rfe(&hyper, &d, RfeSchedule::Fixed { chunk: n - k }).unwrap();
            assert_eq!(top_k(&rfe, k).unwrap().key(), top_k(&w, k).unwrap().key(), "k={k}");
        }
    }

    #[test]
    fn rfe_full_order_is_permutation() {
        let d = GaussianProblem::new(10, 90, 3, 1.5).generate("g", 9);
        let hyper = Hyperparams {
            rfe_halve_until: 10,
            ..fast()
        };
        let r = rank_features(RankerKind::SvmRfe, &hyper, &d, 0).unwrap();
        let mut f = r.features().to_vec();
        f.sort_unstable();
        assert_eq!(f, (0..90).collect::<Vec<_>>());
    }

    #[test]
    fn relieff_invariant_to_affine_rescaling() {
        let d = GaussianProblem::new(8, 5, 2, 1.0).generate("g", 4);
        let base = rank_features(RankerKind::Relieff, &fast(), &d, 0).unwrap();
        let rows: Vec<Vec<f64>> = (0..d.n_instances())
            .map(|i| {
                let mut r = d.row(i).to_vec();
                r[1] = -3.0 * r[1] + 40.0;
                r
            })
            .collect();
        let names = d.feature_names().to_vec();
        let labels: Vec<String> = d.labels().iter().map(|&l| d.class_names()[l].clone()).collect();
        let scaled = Dataset::from_labelled_rows("s", Matrix::from_rows(&rows), &labels, names).unwrap();
        let other = rank_features(RankerKind::Relieff, &fast(), &scaled, 0).unwrap();
        assert_eq!(base.features(), other.features());
        for (a, b) in base.scores().iter().zip(other.scores()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn rank_order_invariant_to_row_permutation(seed in 0u64..1000, shuffle in 0u64..1000) {
            let d = GaussianProblem::new(6, 8, 2, 1.0).generate("g", seed);
            let mut rows: Vec<usize> = (0..d.n_instances()).collect();
            rows.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
            let p = d.subset_rows(&rows);
            for k in RankerKind::ALL {
                let a = rank_features(k, &fast(), &d, 7).unwrap();
                let b = rank_features(k, &fast(), &p, 7).unwrap();
                prop_assert_eq!(a.features(), b.features(), "{}", k);
            }
        }
    }
}
