use std::f64::consts::PI;

use crate::matrix::Matrix;

use super::{class_priors, softmax_present};

/// Gaussian naive Bayes. Each class-feature variance is floored at
/// `floor · range²`, the range taken over the whole training set; features
/// with zero range carry no information and are skipped.
#[derive(Debug, Clone)]
pub(crate) struct NaiveBayes {
    log_priors: Vec<f64>,
    present: Vec<bool>,
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
    active: Vec<bool>,
}

impl NaiveBayes {
    pub(crate) fn fit(x: &Matrix, y: &[usize], n_classes: usize, floor: f64) -> Self {
        let n = x.n_cols();
        let priors = class_priors(y, n_classes);
        let present: Vec<bool> = priors.iter().map(|&p| p > 0.0).collect();
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; n]; n_classes];
        for i in 0..x.n_rows() {
            counts[y[i]] += 1;
            for (m, v) in means[y[i]].iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        for (m, &c) in means.iter_mut().zip(&counts) {
            if c > 0 {
                m.iter_mut().for_each(|v| *v /= c as f64);
            }
        }
        let mut vars = vec![vec![0.0; n]; n_classes];
        for i in 0..x.n_rows() {
            let k = y[i];
            for j in 0..n {
                vars[k][j] += (x.get(i, j) - means[k][j]).powi(2);
            }
        }
        let mut active = vec![true; n];
        for j in 0..n {
            let col = (0..x.n_rows()).map(|i| x.get(i, j));
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            let range = hi - lo;
            if range <= 0.0 {
                active[j] = false;
                continue;
            }
            let min_var = (floor * range * range).max(f64::MIN_POSITIVE);
            for k in 0..n_classes {
                if counts[k] > 1 {
                    vars[k][j] /= (counts[k] - 1) as f64;
                }
                vars[k][j] = vars[k][j].max(min_var);
            }
        }
        NaiveBayes {
            log_priors: priors.iter().map(|p| p.ln()).collect(),
            present,
            means,
            vars,
            active,
        }
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        let scores: Vec<f64> = (0..self.log_priors.len())
            .map(|k| {
                if !self.present[k] {
                    return 0.0;
                }
                let mut s = self.log_priors[k];
                for (j, &v) in q.iter().enumerate() {
                    if !self.active[j] {
                        continue;
                    }
                    let var = self.vars[k][j];
                    let d = v - self.means[k][j];
                    s += -0.5 * (2.0 * PI * var).ln() - d * d / (2.0 * var);
                }
                s
            })
            .collect();
        softmax_present(&scores, &self.present)
    }
}
