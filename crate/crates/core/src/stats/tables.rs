use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use super::{best_group, friedman_test, rank_rows, FriedmanResult};
use crate::classifiers::ClassifierKind;
use crate::error::{Error, Result};
use crate::harness::RunRecord;
use crate::rankers::RankerKind;
use crate::selectors::SelectionScheme;

/// Which error of a record gets ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    TrueError,
    EstError,
}

impl Metric {
    pub fn of(self, r: &RunRecord) -> f64 {
        if r.is_error() {
            return f64::NAN;
        }
        match self {
            Metric::TrueError => r.true_error,
            Metric::EstError => r.est_error,
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "true_error" | "true" => Ok(Metric::TrueError),
            "est_error" | "est" => Ok(Metric::EstError),
            _ => Err(Error::invalid(format!("unknown metric {s:?}"))),
        }
    }
}

type Block = (String, usize);
type Combo = (ClassifierKind, Option<RankerKind>, SelectionScheme);

fn value_map(records: &[RunRecord], metric: Metric) -> BTreeMap<(Block, Combo), f64> {
    records
        .iter()
        .map(|r| (((r.dataset.clone(), r.run), (r.classifier, r.ranker, r.selector)), metric.of(r)))
        .collect()
}

/// One row of the selector table: a (classifier, ranker) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTableRow {
    pub classifier: ClassifierKind,
    pub ranker: RankerKind,
    /// Average rank per column; NaN when no block was complete.
    pub avg_ranks: Vec<f64>,
    /// Column indices indistinguishable from the best.
    pub best_group: Vec<usize>,
    pub n_blocks: usize,
    pub friedman: Option<FriedmanResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub columns: Vec<SelectionScheme>,
    pub rows: Vec<RankTableRow>,
    pub alpha: f64,
    pub metric: Metric,
}

/// Average ranks of the selection schemes within every (classifier, ranker)
/// pair, blocks being (dataset, run). `ALL` has no ranker, so its record is
/// shared by every ranker row of its classifier.
pub fn selector_rank_table(records: &[RunRecord], metric: Metric, alpha: f64) -> RankTable {
    let values = value_map(records, metric);
    let present: BTreeSet<SelectionScheme> = records.iter().map(|r| r.selector).collect();
    let columns: Vec<SelectionScheme> = SelectionScheme::ALL_SCHEMES.into_iter().filter(|s| present.contains(s)).collect();
    let blocks: BTreeSet<Block> = records.iter().map(|r| (r.dataset.clone(), r.run)).collect();
    let pairs: BTreeSet<(ClassifierKind, RankerKind)> =
        records.iter().filter_map(|r| r.ranker.map(|k| (r.classifier, k))).collect();

    let mut rows = Vec::new();
    for (c, k) in pairs {
        let mut matrix = Vec::new();
        for b in &blocks {
            let row: Vec<f64> = columns
                .iter()
                .map(|&s| {
                    let ranker = s.needs_ranking().then_some(k);
                    values.get(&(b.clone(), (c, ranker, s))).copied().unwrap_or(f64::NAN)
                })
                .collect();
            if row.iter().all(|v| v.is_finite()) {
                matrix.push(row);
            }
        }
        let skipped = blocks.len() - matrix.len();
        if skipped > 0 {
            warn!("{}/{}: {skipped} of {} blocks incomplete, ranked on the rest", c.tag(), k.tag(), blocks.len());
        }
        let row = match rank_rows(&matrix) {
            Ok(ranks) => {
                let avg = ranks.column_means();
                RankTableRow {
                    classifier: c,
                    ranker: k,
                    best_group: best_group(&avg, &ranks, alpha),
                    avg_ranks: avg,
                    n_blocks: ranks.n_blocks(),
                    friedman: friedman_test(&ranks).ok(),
                }
            }
            Err(_) => RankTableRow {
                classifier: c,
                ranker: k,
                avg_ranks: vec![f64::NAN; columns.len()],
                best_group: Vec::new(),
                n_blocks: 0,
                friedman: None,
            },
        };
        rows.push(row);
    }
    RankTable {
        columns,
        rows,
        alpha,
        metric,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationRank {
    pub classifier: ClassifierKind,
    pub ranker: Option<RankerKind>,
    pub selector: SelectionScheme,
    pub avg_rank: f64,
}

impl CombinationRank {
    pub fn label(&self) -> String {
        match self.ranker {
            Some(k) => format!("{}/{}/{}", self.classifier.tag(), k.tag(), self.selector.tag()),
            None => format!("{}/{}", self.classifier.tag(), self.selector.tag()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationRanking {
    /// Sorted by average rank, best first.
    pub rows: Vec<CombinationRank>,
    pub n_blocks: usize,
    pub skipped_blocks: usize,
    pub friedman: Option<FriedmanResult>,
}

/// Ranks every (classifier, ranker, selector) combination within each
/// (dataset, run) block and averages. Blocks missing any combination are
/// left out with a warning.
pub fn combination_ranking(records: &[RunRecord], metric: Metric) -> Result<CombinationRanking> {
    let values = value_map(records, metric);
    let combos: BTreeSet<Combo> = records.iter().map(|r| (r.classifier, r.ranker, r.selector)).collect();
    let combos: Vec<Combo> = combos.into_iter().collect();
    let blocks: BTreeSet<Block> = records.iter().map(|r| (r.dataset.clone(), r.run)).collect();
    let mut matrix = Vec::new();
    for b in &blocks {
        let row: Vec<f64> = combos
            .iter()
            .map(|c| values.get(&(b.clone(), *c)).copied().unwrap_or(f64::NAN))
            .collect();
        if row.iter().all(|v| v.is_finite()) {
            matrix.push(row);
        }
    }
    let skipped = blocks.len() - matrix.len();
    if skipped > 0 {
        warn!("combination ranking: {skipped} of {} blocks incomplete, ranked on the rest", blocks.len());
    }
    if matrix.is_empty() {
        return Err(Error::invalid("combination ranking: no complete (dataset, run) block"));
    }
    let ranks = rank_rows(&matrix)?;
    let avg = ranks.column_means();
    let mut rows: Vec<CombinationRank> = combos
        .iter()
        .zip(&avg)
        .map(|(&(classifier, ranker, selector), &avg_rank)| CombinationRank {
            classifier,
            ranker,
            selector,
            avg_rank,
        })
        .collect();
    rows.sort_by(|a, b| a.avg_rank.total_cmp(&b.avg_rank));
    Ok(CombinationRanking {
        rows,
        n_blocks: ranks.n_blocks(),
        skipped_blocks: skipped,
        friedman: friedman_test(&ranks).ok(),
    })
}

/// Which factor the glyph series compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Classifier,
    Ranker,
    Selector,
}

impl std::str::FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classifier" | "classifiers" => Ok(Factor::Classifier),
            "ranker" | "rankers" => Ok(Factor::Ranker),
            "selector" | "selectors" => Ok(Factor::Selector),
            _ => Err(Error::invalid(format!("unknown factor {s:?}"))),
        }
    }
}

/// Per-dataset average ranks of the levels of one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorRanks {
    pub factor: Factor,
    /// Datasets with at least one complete block.
    pub spokes: Vec<String>,
    /// Level name and one average rank per spoke.
    pub series: Vec<(String, Vec<f64>)>,
}

/// The levels of `factor` are ranked inside every block formed by the other
/// factors and the (dataset, run), then averaged per dataset.
pub fn factor_ranks(records: &[RunRecord], metric: Metric, factor: Factor) -> FactorRanks {
    let values = value_map(records, metric);
    let blocks: BTreeSet<Block> = records.iter().map(|r| (r.dataset.clone(), r.run)).collect();
    let classifiers: Vec<ClassifierKind> = records.iter().map(|r| r.classifier).collect::<BTreeSet<_>>().into_iter().collect();
    let rankers: Vec<RankerKind> = records.iter().filter_map(|r| r.ranker).collect::<BTreeSet<_>>().into_iter().collect();
    let selectors: Vec<SelectionScheme> = records.iter().map(|r| r.selector).collect::<BTreeSet<_>>().into_iter().collect();
    let ranked_selectors: Vec<SelectionScheme> = selectors.iter().copied().filter(|s| s.needs_ranking()).collect();

    // Each entry is one block: the combos of the compared levels.
    let mut inner: Vec<Vec<Combo>> = Vec::new();
    let levels: Vec<String> = match factor {
        Factor::Classifier => {
            for &s in &selectors {
                let ks: Vec<Option<RankerKind>> = if s.needs_ranking() { rankers.iter().map(|&k| Some(k)).collect() } else { vec![None] };
                for k in ks {
                    inner.push(classifiers.iter().map(|&c| (c, k, s)).collect());
                }
            }
            classifiers.iter().map(|c| c.tag().to_string()).collect()
        }
        Factor::Ranker => {
            for &c in &classifiers {
                for &s in &ranked_selectors {
                    inner.push(rankers.iter().map(|&k| (c, Some(k), s)).collect());
                }
            }
            rankers.iter().map(|k| k.tag().to_string()).collect()
        }
        Factor::Selector => {
            for &c in &classifiers {
                for &k in &rankers {
                    inner.push(selectors.iter().map(|&s| (c, s.needs_ranking().then_some(k), s)).collect());
                }
            }
            selectors.iter().map(|s| s.tag().to_string()).collect()
        }
    };

    let mut per_dataset: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for b in &blocks {
        for combos in &inner {
            let row: Vec<f64> = combos.iter().map(|c| values.get(&(b.clone(), *c)).copied().unwrap_or(f64::NAN)).collect();
            if !row.is_empty() && row.iter().all(|v| v.is_finite()) {
                per_dataset.entry(b.0.clone()).or_default().push(row);
            }
        }
    }
    let datasets: BTreeSet<&String> = blocks.iter().map(|b| &b.0).collect();
    for d in datasets {
        if !per_dataset.contains_key(d) {
            warn!("factor ranks: dataset {d:?} has no complete block and is left out");
        }
    }
    let mut spokes = Vec::new();
    let mut series: Vec<(String, Vec<f64>)> = levels.into_iter().map(|l| (l, Vec::new())).collect();
    for (d, rows) in per_dataset {
        let means = rank_rows(&rows).expect("complete rows").column_means();
        spokes.push(d);
        for (s, m) in series.iter_mut().zip(means) {
            s.1.push(m);
        }
    }
    FactorRanks { factor, spokes, series }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::FeatureSubset;

    fn rec(dataset: &str, run: usize, c: ClassifierKind, k: Option<RankerKind>, s: SelectionScheme, e: f64) -> RunRecord {
        RunRecord {
            dataset: dataset.into(),
            run,
            classifier: c,
            ranker: k,
            selector: s,
            subset: FeatureSubset::new(vec![0]),
            est_error: e,
            true_error: e,
            evaluations: 1,
            seed: 0,
            duration: None,
            error: None,
        }
    }

    /// Full grid for one block with error depending on the combination.
    fn block(dataset: &str, run: usize, f: impl Fn(usize, usize, usize) -> f64) -> Vec<RunRecord> {
        let mut out = Vec::new();
        for (ci, c) in ClassifierKind::ALL.into_iter().enumerate() {
            out.push(rec(dataset, run, c, None, SelectionScheme::All, f(ci, 9, 0)));
            for (ki, k) in RankerKind::ALL.into_iter().enumerate() {
                for (si, s) in SelectionScheme::RANKED.into_iter().enumerate() {
                    out.push(rec(dataset, run, c, Some(k), s, f(ci, ki, si + 1)));
                }
            }
        }
        out
    }

    #[test]
    fn full_grid_has_217_combinations() {
        let recs = block("d", 1, |c, k, s| (c * 100 + k * 10 + s) as f64 / 1000.0);
        let cr = combination_ranking(&recs, Metric::TrueError).unwrap();
        assert_eq!(cr.rows.len(), 217);
        assert_eq!(cr.n_blocks, 1);
        // one block: averages are the raw ranks 1..217
        for (i, r) in cr.rows.iter().enumerate() {
            assert_eq!(r.avg_rank, (i + 1) as f64);
        }
        let t = selector_rank_table(&recs, Metric::TrueError, 0.05);
        assert_eq!(t.rows.len(), 35);
        assert_eq!(t.columns.len(), 7);
    }

    #[test]
    fn incomplete_blocks_are_skipped() {
        let mut recs = block("d", 1, |c, k, s| (c + k + s) as f64);
        recs.extend(block("d", 2, |c, k, s| (c + k + s) as f64));
        recs[0].error = Some("boom".into());
        let cr = combination_ranking(&recs, Metric::TrueError).unwrap();
        assert_eq!((cr.n_blocks, cr.skipped_blocks), (1, 1));
        recs.pop();
        assert!(combination_ranking(&recs, Metric::TrueError).is_err());
    }

    #[test]
    fn selector_table_shares_all_across_rankers() {
        let mut recs = Vec::new();
        for run in 1..=6 {
            recs.extend(block("d", run, |_, _, s| if s == 0 { 0.0 } else { s as f64 + run as f64 * 0.01 }));
        }
        let t = selector_rank_table(&recs, Metric::TrueError, 0.05);
        for row in &t.rows {
            assert_eq!(row.avg_ranks[0], 1.0);
            assert_eq!(row.best_group, vec![0]);
            assert_eq!(row.n_blocks, 6);
        }
    }

    #[test]
    fn factor_ranks_shape() {
        let mut recs = block("a", 1, |c, _, _| c as f64);
        recs.extend(block("b", 1, |c, _, _| -(c as f64)));
        let f = factor_ranks(&recs, Metric::TrueError, Factor::Classifier);
        assert_eq!(f.spokes, vec!["a", "b"]);
        assert_eq!(f.series.len(), 7);
        assert_eq!(f.series[0].1, vec![1.0, 7.0]);
        let s = factor_ranks(&recs, Metric::TrueError, Factor::Selector);
        assert_eq!(s.series.len(), 7);
        let k = factor_ranks(&recs, Metric::TrueError, Factor::Ranker);
        assert_eq!(k.series.len(), 5);
        assert!(k.series.iter().all(|(_, v)| v == &vec![3.0, 3.0]));
    }
}
