use serde::{Deserialize, Serialize};

use crate::classifiers::{argmax, fit_matrix, ClassifierKind};
use crate::config::Hyperparams;
use crate::dataset::{stratified_split, Dataset};
use crate::error::{Error, Result};
use crate::estimators::{project_sorted, EstimateKind};
use crate::rankers::{rank_features, top_k, RankerKind};
use crate::selectors::{power_set, tie_break};
use crate::subset::FeatureSubset;

/// The four estimates of one subset of the top-10 features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyRow {
    /// 1-based positions in the top-10 list.
    pub ranks: Vec<usize>,
    pub subset: FeatureSubset,
    pub resub: f64,
    pub loo: f64,
    pub sloo: f64,
    pub true_error: f64,
}

/// Winning subset under one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub estimator: EstimateKind,
    pub ranks: Vec<usize>,
    pub subset: FeatureSubset,
    /// Value of the estimator itself; absent for the holdout row.
    pub predicted: Option<f64>,
    pub true_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub dataset: String,
    pub probe_seed: u64,
    pub classifier: ClassifierKind,
    pub ranker: RankerKind,
    /// Feature indices of the top 10, best first.
    pub top10: Vec<usize>,
    pub rows: Vec<CaseStudyRow>,
    /// RESUB, LOO, SLOO and HOLDOUT winners, in that order.
    pub best: Vec<BestRow>,
}

impl CaseStudy {
    /// `(estimate, truth)` pairs per estimator, for the scatter panels.
    pub fn scatter(&self, kind: EstimateKind) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| {
                let e = match kind {
                    EstimateKind::Resub => r.resub,
                    EstimateKind::Loo => r.loo,
                    EstimateKind::Sloo => r.sloo,
                    _ => r.true_error,
                };
                (e, r.true_error)
            })
            .collect()
    }

    pub fn best_for(&self, kind: EstimateKind) -> Option<&BestRow> {
        self.best.iter().find(|b| b.estimator == kind)
    }
}

/// All 1023 non-empty subsets of the SU top 10 on a 10-per-class probe,
/// each scored by LDC with resubstitution, counting and smoothed LOO, and
/// holdout error on the rest of the data.
pub fn sonar_case_study(sonar: &Dataset, hyper: &Hyperparams, probe_seed: u64) -> Result<CaseStudy> {
    if sonar.n_classes() != 2 {
        return Err(Error::InvalidDataset(format!(
            "case study needs two classes, {:?} has {}",
            sonar.name(),
            sonar.n_classes()
        )));
    }
    let kind = ClassifierKind::Ldc;
    let split = stratified_split(sonar, 10, probe_seed)?;
    let probe = &split.probe;
    let ranked = rank_features(RankerKind::Su, hyper, probe, probe_seed)?;
    let top = top_k(&ranked, 10.min(ranked.len()))?;
    let pool = top.indices().to_vec();
    let position = |f: usize| pool.iter().position(|&p| p == f).unwrap() + 1;

    let y = probe.labels();
    let n = probe.n_instances();
    let nc = probe.n_classes();
    let mut rows = Vec::with_capacity(1023);
    for subset in power_set(&pool).into_iter().skip(1) {
        let x = project_sorted(probe, &subset)?;
        let full = fit_matrix(kind, hyper, &x, y, nc, probe_seed);
        let resub = (0..n).filter(|&i| argmax(&full.posterior(x.row(i))) != y[i]).count() as f64 / n as f64;
        let (mut loo, mut sloo) = (0.0, 0.0);
        for i in 0..n {
            let mut yt = y.to_vec();
            yt.remove(i);
            let m = fit_matrix(kind, hyper, &x.without_row(i), &yt, nc, probe_seed);
            let p = m.posterior(x.row(i));
            loo += if argmax(&p) == y[i] { 0.0 } else { 1.0 };
            sloo += 1.0 - p[y[i]];
        }
        let hx = project_sorted(&split.holdout, &subset)?;
        let hy = split.holdout.labels();
        let wrong = (0..hx.n_rows()).filter(|&i| argmax(&full.posterior(hx.row(i))) != hy[i]).count();
        rows.push(CaseStudyRow {
            ranks: subset.indices().iter().map(|&f| position(f)).collect(),
            subset,
            resub,
            loo: loo / n as f64,
            sloo: sloo / n as f64,
            true_error: wrong as f64 / hx.n_rows() as f64,
        });
    }

    let pick = |value: &dyn Fn(&CaseStudyRow) -> f64| -> usize {
        let best = rows.iter().map(value).fold(f64::INFINITY, f64::min);
        let min_len = rows.iter().filter(|r| value(r) == best).map(|r| r.ranks.len()).min().unwrap();
        let tied: Vec<usize> = (0..rows.len())
            .filter(|&i| value(&rows[i]) == best && rows[i].ranks.len() == min_len)
            .collect();
        tied[tie_break(probe_seed, tied.len())]
    };
    let mut best = Vec::new();
    let estimators: [(EstimateKind, &dyn Fn(&CaseStudyRow) -> f64); 4] = [
        (EstimateKind::Resub, &|r| r.resub),
        (EstimateKind::Loo, &|r| r.loo),
        (EstimateKind::Sloo, &|r| r.sloo),
        (EstimateKind::Holdout, &|r| r.true_error),
    ];
    for (kind, value) in estimators {
        let i = pick(value);
        best.push(BestRow {
            estimator: kind,
            ranks: rows[i].ranks.clone(),
            subset: rows[i].subset.clone(),
            predicted: (kind != EstimateKind::Holdout).then(|| value(&rows[i])),
            true_error: rows[i].true_error,
        });
    }
    Ok(CaseStudy {
        dataset: sonar.name().to_string(),
        probe_seed,
        classifier: kind,
        ranker: RankerKind::Su,
        top10: pool,
        rows,
        best,
    })
}
