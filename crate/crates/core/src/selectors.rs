//! Selection schemes. Each maps a ranked list to one feature subset,
//! choosing among its candidates by smoothed leave-one-out error.
//!
//! | scheme | candidates | budget |
//! |--------|-----------|--------|
//! | `ALL`   | every feature | 1 |
//! | `TOP3`, `TOP10`, `TOP20` | the top k | 1 |
//! | `BEST3` | all triples of the top 20 | 1140 |
//! | `EX10`  | all subsets of the top 10, empty set included | 1024 |
//! | `RND20` | 1024 random masks over the top 20, p = 0.5 per feature | 1024 |
//!
//! The winner has the lowest criterion; ties go to the smallest subset,
//! then to a seeded uniform draw among the remaining tied candidates.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierKind;
use crate::config::Hyperparams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{loo_on_matrix, project_sorted, ErrorEstimate, EstimateKind};
use crate::rankers::{top_k, RankedList};
use crate::seed::derive_named;
use crate::subset::FeatureSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SelectionScheme {
    #[serde(rename = "ALL")]
    All,
    #[serde(rename = "TOP3")]
    Top3,
    #[serde(rename = "TOP10")]
    Top10,
    #[serde(rename = "TOP20")]
    Top20,
    #[serde(rename = "BEST3")]
    Best3,
    #[serde(rename = "EX10")]
    Ex10,
    #[serde(rename = "RND20")]
    Rnd20,
}

pub const RND20_DRAWS: usize = 1024;

impl SelectionScheme {
    pub const ALL_SCHEMES: [SelectionScheme; 7] = [
        SelectionScheme::All,
        SelectionScheme::Top3,
        SelectionScheme::Top10,
        SelectionScheme::Top20,
        SelectionScheme::Best3,
        SelectionScheme::Ex10,
        SelectionScheme::Rnd20,
    ];

    /// The six schemes that consume a ranking.
    pub const RANKED: [SelectionScheme; 6] = [
        SelectionScheme::Top3,
        SelectionScheme::Top10,
        SelectionScheme::Top20,
        SelectionScheme::Best3,
        SelectionScheme::Ex10,
        SelectionScheme::Rnd20,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SelectionScheme::All => "ALL",
            SelectionScheme::Top3 => "TOP3",
            SelectionScheme::Top10 => "TOP10",
            SelectionScheme::Top20 => "TOP20",
            SelectionScheme::Best3 => "BEST3",
            SelectionScheme::Ex10 => "EX10",
            SelectionScheme::Rnd20 => "RND20",
        }
    }

    /// Number of top-ranked features the scheme draws from; 0 for `ALL`.
    pub fn pool_size(self) -> usize {
        match self {
            SelectionScheme::All => 0,
            SelectionScheme::Top3 => 3,
            SelectionScheme::Top10 | SelectionScheme::Ex10 => 10,
            SelectionScheme::Top20 | SelectionScheme::Best3 | SelectionScheme::Rnd20 => 20,
        }
    }

    /// Criterion evaluations requested per selection.
    pub fn budget(self) -> usize {
        match self {
            SelectionScheme::Best3 => 1140,
            SelectionScheme::Ex10 => 1024,
            SelectionScheme::Rnd20 => RND20_DRAWS,
            _ => 1,
        }
    }

    pub fn needs_ranking(self) -> bool {
        self != SelectionScheme::All
    }
}

impl fmt::Display for SelectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SelectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        SelectionScheme::ALL_SCHEMES
            .into_iter()
            .find(|k| k.tag() == up)
            .ok_or_else(|| Error::invalid(format!("unknown selection scheme {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub subset: FeatureSubset,
    /// Smoothed leave-one-out error of `subset`.
    pub criterion: ErrorEstimate,
    /// Criterion requests made, cache hits included.
    pub evaluations: usize,
    /// Distinct candidates sharing the winning criterion and cardinality.
    pub candidates_tied: usize,
}

/// Smoothed LOO values memoised by subset membership for one
/// (probe, classifier, seed). Reuse one cache across schemes and rankers
/// of the same cell to avoid retraining identical subsets.
#[derive(Debug, Clone)]
pub struct CriterionCache {
    kind: ClassifierKind,
    seed: u64,
    probe_key: (String, usize, usize),
    values: HashMap<Vec<usize>, f64>,
}

impl CriterionCache {
    pub fn new(kind: ClassifierKind, probe: &Dataset, seed: u64) -> Self {
        CriterionCache {
            kind,
            seed,
            probe_key: (probe.name().to_string(), probe.n_instances(), probe.n_features()),
            values: HashMap::new(),
        }
    }

    fn matches(&self, kind: ClassifierKind, probe: &Dataset, seed: u64) -> bool {
        self.kind == kind
            && self.seed == seed
            && self.probe_key == (probe.name().to_string(), probe.n_instances(), probe.n_features())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn get_or_eval(&mut self, hyper: &Hyperparams, probe: &Dataset, subset: &FeatureSubset) -> Result<f64> {
        let key = subset.key();
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let x = project_sorted(probe, subset)?;
        let v = loo_on_matrix(self.kind, hyper, &x, probe.labels(), probe.n_classes(), self.seed, true);
        self.values.insert(key, v);
        Ok(v)
    }
}

/// Index in `0..n_tied` drawn for the final tie-break of a selection.
pub fn tie_break(seed: u64, n_tied: usize) -> usize {
    if n_tied <= 1 {
        return 0;
    }
    ChaCha8Rng::seed_from_u64(derive_named(seed, "tie")).gen_range(0..n_tied)
}

/// The RND20 masks for a seed: `draws` vectors of `pool` independent fair
/// coin flips.
pub fn random_masks(seed: u64, pool: usize, draws: usize) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_named(seed, "rnd20"));
    (0..draws)
        .map(|_| (0..pool).map(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

fn from_mask(pool: &[usize], mask: impl Fn(usize) -> bool) -> FeatureSubset {
    FeatureSubset::new((0..pool.len()).filter(|&i| mask(i)).map(|i| pool[i]).collect())
}

/// Candidate subsets of a scheme, in ordinal order.
pub fn candidates(
    scheme: SelectionScheme,
    ranked: &RankedList,
    n_features: usize,
    seed: u64,
) -> Result<Vec<FeatureSubset>> {
    let need = scheme.pool_size();
    if ranked.len() < need {
        return Err(Error::InsufficientFeatures {
            scheme: scheme.tag().to_string(),
            needed: need,
            available: ranked.len(),
        });
    }
    let pool = &ranked.features()[..need];
    Ok(match scheme {
        SelectionScheme::All => vec![FeatureSubset::all(n_features)],
        SelectionScheme::Top3 | SelectionScheme::Top10 | SelectionScheme::Top20 => {
            vec![top_k(ranked, need)?]
        }
        SelectionScheme::Best3 => {
            let mut out = Vec::with_capacity(1140);
            for a in 0..need {
                for b in a + 1..need {
                    for c in b + 1..need {
                        out.push(FeatureSubset::new(vec![pool[a], pool[b], pool[c]]));
                    }
                }
            }
            out
        }
        SelectionScheme::Ex10 => power_set(pool),
        SelectionScheme::Rnd20 => random_masks(seed, need, RND20_DRAWS)
            .iter()
            .map(|m| from_mask(pool, |i| m[i]))
            .collect(),
    })
}

/// Every subset of `pool`; candidate `m` holds the pool positions set in
/// the bits of `m`, so the empty set comes first.
pub fn power_set(pool: &[usize]) -> Vec<FeatureSubset> {
    (0..1usize << pool.len())
        .map(|m| from_mask(pool, |i| m >> i & 1 == 1))
        .collect()
}

/// Scores `cands` in order and applies the tie rule.
pub fn select_among(
    cands: &[FeatureSubset],
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    seed: u64,
    cache: &mut CriterionCache,
) -> Result<SelectionResult> {
    if cands.is_empty() {
        return Err(Error::invalid("no candidate subsets"));
    }
    if !cache.matches(kind, probe, seed) {
        return Err(Error::invalid("criterion cache belongs to a different probe, classifier or seed"));
    }
    let mut scores = Vec::with_capacity(cands.len());
    for s in cands {
        scores.push(cache.get_or_eval(hyper, probe, s)?);
    }
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let min_len = (0..cands.len())
        .filter(|&i| scores[i] == best)
        .map(|i| cands[i].len())
        .min()
        .unwrap();
    let mut tied: Vec<usize> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for i in 0..cands.len() {
        if scores[i] == best && cands[i].len() == min_len {
            let k = cands[i].key();
            if !seen.contains(&k) {
                seen.push(k);
                tied.push(i);
            }
        }
    }
    let pick = tied[tie_break(seed, tied.len())];
    Ok(SelectionResult {
        subset: cands[pick].clone(),
        criterion: ErrorEstimate {
            value: best,
            kind: EstimateKind::Sloo,
            n_evaluations: probe.n_instances(),
        },
        evaluations: cands.len(),
        candidates_tied: tied.len(),
    })
}

/// Runs `scheme` on `probe` with a fresh criterion cache.
pub fn select(
    scheme: SelectionScheme,
    ranked: &RankedList,
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    seed: u64,
) -> Result<SelectionResult> {
    let mut cache = CriterionCache::new(kind, probe, seed);
    select_cached(scheme, ranked, kind, hyper, probe, seed, &mut cache)
}

/// [`select`] sharing a caller-owned cache.
pub fn select_cached(
    scheme: SelectionScheme,
    ranked: &RankedList,
    kind: ClassifierKind,
    hyper: &Hyperparams,
    probe: &Dataset,
    seed: u64,
    cache: &mut CriterionCache,
) -> Result<SelectionResult> {
    if scheme.needs_ranking() && ranked.len() != probe.n_features() {
        return Err(Error::invalid(format!(
            "ranking covers {} features, probe has {}",
            ranked.len(),
            probe.n_features()
        )));
    }
    let cands = candidates(scheme, ranked, probe.n_features(), seed)?;
    select_among(&cands, kind, hyper, probe, seed, cache)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::GaussianProblem;
    use crate::estimators::loo_error;
    use crate::matrix::Matrix;
    use crate::rankers::{rank_features, RankerKind};
    use proptest::prelude::*;

    fn h() -> Hyperparams {
        Hyperparams {
            rf_trees: 10,
            rf_imp_trees: 10,
            ..Hyperparams::default()
        }
    }

    #[test]
    fn tags_budgets_and_pools() {
        for s in SelectionScheme::ALL_SCHEMES {
            assert_eq!(s.tag().parse::<SelectionScheme>().unwrap(), s);
        }
        assert_eq!(SelectionScheme::Best3.budget(), 1140);
        assert_eq!(SelectionScheme::Ex10.budget(), 1024);
        assert_eq!(SelectionScheme::Rnd20.budget(), 1024);
        assert_eq!(SelectionScheme::Top10.budget(), 1);
    }

    #[test]
    fn candidate_counts_match_budgets() {
        let ranked = RankedList::from_scores(&(0..25).map(|i| -(i as f64)).collect::<Vec<_>>());
        for s in SelectionScheme::ALL_SCHEMES {
            let c = candidates(s, &ranked, 25, 1).unwrap();
            assert_eq!(c.len(), s.budget(), "{s}");
        }
        let ex = candidates(SelectionScheme::Ex10, &ranked, 25, 1).unwrap();
        assert!(ex[0].is_empty());
    }

    #[test]
    fn insufficient_pool() {
        let ranked = RankedList::from_scores(&[0.0; 12]);
        assert!(candidates(SelectionScheme::Ex10, &ranked, 12, 0).is_ok());
        let err = candidates(SelectionScheme::Best3, &ranked, 12, 0).unwrap_err();
        assert!(matches!(err, Error::InsufficientFeatures { needed: 20, available: 12, .. }));
    }

    #[test]
    fn rnd20_masks_reproducible() {
        assert_eq!(random_masks(4, 20, 50), random_masks(4, 20, 50));
        assert_ne!(random_masks(4, 20, 50), random_masks(5, 20, 50));
    }

    #[test]
    fn budget_one_criterion_equals_direct_sloo() {
        let d = GaussianProblem::new(6, 22, 3, 1.5).generate("g", 3);
        let ranked = rank_features(RankerKind::Su, &h(), &d, 0).unwrap();
        for s in [SelectionScheme::All, SelectionScheme::Top3, SelectionScheme::Top10, SelectionScheme::Top20] {
            let r = select(s, &ranked, ClassifierKind::Nb, &h(), &d, 0).unwrap();
            let direct = loo_error(ClassifierKind::Nb, &h(), &d, &r.subset, 0, true).unwrap();
            assert_eq!(r.criterion.value, direct.value, "{s}");
            assert_eq!(r.evaluations, 1);
        }
    }

    #[test]
    fn ex10_dominates_fixed_subsets() {
        let d = GaussianProblem::new(6, 12, 3, 1.0).generate("g", 6);
        let ranked = rank_features(RankerKind::Su, &h(), &d, 0).unwrap();
        let ex = select(SelectionScheme::Ex10, &ranked, ClassifierKind::Ldc, &h(), &d, 0).unwrap();
        assert_eq!(ex.evaluations, 1024);
        for s in [SelectionScheme::Top3, SelectionScheme::Top10] {
            let r = select(s, &ranked, ClassifierKind::Ldc, &h(), &d, 0).unwrap();
            assert!(ex.criterion.value <= r.criterion.value);
        }
    }

    // A constant column never changes 1NN distances, so any subset with it
    // ties its twin without it; the smaller twin must win.
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn ties_resolve_to_minimum_cardinality(seed in 0u64..1000) {
            let g = GaussianProblem::new(5, 4, 2, 1.0).generate("g", seed);
            let rows: Vec<Vec<f64>> = (0..g.n_instances())
                .map(|i| { let mut r = g.row(i).to_vec(); r.push(3.0); r })
                .collect();
            let labels: Vec<String> = g.labels().iter().map(|&l| g.class_names()[l].clone()).collect();
            let names = (0..5).map(|i| format!("f{i}")).collect();
            let d = Dataset::from_labelled_rows("c", Matrix::from_rows(&rows), &labels, names).unwrap();
            let cands = power_set(&[4, 0, 1, 2, 3]);
            let mut cache = CriterionCache::new(ClassifierKind::Nn1, &d, seed);
            let r = select_among(&cands, ClassifierKind::Nn1, &h(), &d, seed, &mut cache).unwrap();
            prop_assert!(!r.subset.contains(4) || r.subset.len() == 1);
            for c in &cands {
                let v = loo_error(ClassifierKind::Nn1, &h(), &d, c, seed, true).unwrap().value;
                prop_assert!(v > r.criterion.value || (v == r.criterion.value && c.len() >= r.subset.len()));
            }
        }
    }
}
