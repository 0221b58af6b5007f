//! Within-block ranks, the Friedman test and the sequential best-group
//! procedure, plus the tables built from benchmark records.

mod tables;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplesize::chi2_sf;

pub use tables::{
    combination_ranking, factor_ranks, selector_rank_table, CombinationRank, CombinationRanking,
    Factor, FactorRanks, Metric, RankTable, RankTableRow,
};

/// Blocks by treatments, each row holding midranks (1 = lowest error).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMatrix {
    n_blocks: usize,
    k: usize,
    data: Vec<f64>,
}

impl RankMatrix {
    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.k)
    }

    /// Average rank of each treatment.
    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.k];
        for r in self.rows() {
            for (a, v) in m.iter_mut().zip(r) {
                *a += v;
            }
        }
        m.iter().map(|s| s / self.n_blocks as f64).collect()
    }

    /// Re-ranked matrix restricted to `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> RankMatrix {
        let rows: Vec<Vec<f64>> = self.rows().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        rank_rows(&rows).expect("non-empty selection of a valid matrix")
    }
}

/// Ascending ranks of `values`; tied values share the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Ranks every row of a blocks-by-treatments error matrix.
pub fn rank_rows(errors: &[Vec<f64>]) -> Result<RankMatrix> {
    let k = errors.first().map_or(0, Vec::len);
    if errors.is_empty() || k == 0 {
        return Err(Error::invalid("rank_rows: empty matrix"));
    }
    let mut data = Vec::with_capacity(errors.len() * k);
    for (i, row) in errors.iter().enumerate() {
        if row.len() != k {
            return Err(Error::invalid(format!("rank_rows: row {i} has {} entries, expected {k}", row.len())));
        }
        if row.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid(format!("rank_rows: row {i} has a missing entry")));
        }
        data.extend(midranks(row));
    }
    Ok(RankMatrix {
        n_blocks: errors.len(),
        k,
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub n_blocks: usize,
    pub k_treatments: usize,
}

/// Tie-corrected Friedman chi-square over the rows of `ranks`.
pub fn friedman_test(ranks: &RankMatrix) -> Result<FriedmanResult> {
    let (n, k) = (ranks.n_blocks, ranks.k);
    if n < 2 || k < 2 {
        return Err(Error::invalid(format!("friedman_test needs at least 2 blocks and 2 treatments, got {n}x{k}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in ranks.rows() {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
        let mut sorted = row.to_vec();
        sorted.sort_by(f64::total_cmp);
        for group in sorted.chunk_by(|a, b| a == b) {
            let t = group.len() as f64;
            ties += t * t * t - t;
        }
    }
    let dof = (k - 1) as u32;
    let denom = 1.0 - ties / (nf * kf * (kf * kf - 1.0));
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * sums.iter().map(|r| r * r).sum::<f64>() - 3.0 * nf * (kf + 1.0);
    let (statistic, p_value) = if denom <= 1e-12 {
        (0.0, 1.0)
    } else {
        let q = (raw / denom).max(0.0);
        (q, chi2_sf(q, dof).clamp(0.0, 1.0))
    };
    Ok(FriedmanResult {
        statistic,
        dof,
        p_value,
        n_blocks: n,
        k_treatments: k,
    })
}

/// Treatments ordered by average rank, ties by index.
pub fn order_by_rank(avg_ranks: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..avg_ranks.len()).collect();
    order.sort_by(|&a, &b| avg_ranks[a].total_cmp(&avg_ranks[b]).then(a.cmp(&b)));
    order
}

/// Treatments indistinguishable from the best: grow the prefix of the
/// rank-sorted treatments until the Friedman test on the prefix rejects at
/// `alpha`, and return the prefix before that. Sorted by index.
pub fn best_group(avg_ranks: &[f64], ranks: &RankMatrix, alpha: f64) -> Vec<usize> {
    let order = order_by_rank(avg_ranks);
    if order.is_empty() {
        return Vec::new();
    }
    let mut size = order.len();
    if ranks.n_blocks() >= 2 {
        for m in 2..=order.len() {
            let sub = ranks.select_columns(&order[..m]);
            let p = friedman_test(&sub).map_or(1.0, |f| f.p_value);
            if p < alpha {
                size = m - 1;
                break;
            }
        }
    }
    let mut g = order[..size].to_vec();
    g.sort_unstable();
    g
}

/// Pearson correlation; NaN when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}
