use crate::classifiers::svm::linear_weights;
use crate::config::Hyperparams;
use crate::matrix::Matrix;

/// How SVM-RFE shrinks the surviving feature set between retrainings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfeSchedule {
    /// Drop the weaker half while more than `until` features remain, then
    /// one feature per step.
    Halving { until: usize },
    /// Drop `chunk` features per step (fewer on the last step).
    Fixed { chunk: usize },
}

/// Z-scores each column; constant columns become 0.
pub(crate) fn standardize(x: &Matrix) -> Matrix {
    let (n, m) = (x.n_rows(), x.n_cols());
    let mut out = x.clone();
    for j in 0..m {
        let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
        let sd = var.sqrt();
        for i in 0..n {
            let z = if sd > 0.0 { (x.get(i, j) - mean) / sd } else { 0.0 };
            out.set(i, j, z);
        }
    }
    out
}

/// `|w|` of linear SVMs on the given columns, summed over one-vs-one
/// machines when more than two classes are present.
pub(crate) fn abs_weights(x: &Matrix, y: &[usize], hyper: &Hyperparams) -> Vec<f64> {
    let mut present: Vec<usize> = y.to_vec();
    present.sort_unstable();
    present.dedup();
    let mut score = vec![0.0; x.n_cols()];
    for (a, &pos) in present.iter().enumerate() {
        for &neg in &present[a + 1..] {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == pos || y[i] == neg).collect();
            let xs = x.select_rows(&rows);
            let positive: Vec<bool> = rows.iter().map(|&i| y[i] == pos).collect();
            let w = linear_weights(&xs, &positive, hyper.svm_c, hyper.svm_tol, hyper.svm_max_iter);
            for (s, v) in score.iter_mut().zip(w) {
                *s += v.abs();
            }
        }
    }
    score
}

/// Feature indices from first eliminated to last survivor.
pub(crate) fn rfe_elimination_order(
    x: &Matrix,
    y: &[usize],
    hyper: &Hyperparams,
    schedule: RfeSchedule,
) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..x.n_cols()).collect();
    let mut eliminated = Vec::with_capacity(alive.len());
    while alive.len() > 1 {
        let drop = match schedule {
            RfeSchedule::Halving { until } if alive.len() > until.max(1) => alive.len() / 2,
            RfeSchedule::Halving { .. } => 1,
            RfeSchedule::Fixed { chunk } => chunk.clamp(1, alive.len() - 1),
        };
        let w = abs_weights(&x.select_cols(&alive), y, hyper);
        // weakest first; among equal weights the higher index goes first
        let mut order: Vec<usize> = (0..alive.len()).collect();
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(alive[b].cmp(&alive[a])));
        let mut gone: Vec<usize> = order[..drop].to_vec();
        eliminated.extend(gone.iter().map(|&p| alive[p]));
        gone.sort_unstable();
        for p in gone.into_iter().rev() {
            alive.remove(p);
        }
    }
    eliminated.extend(alive);
    eliminated
}
