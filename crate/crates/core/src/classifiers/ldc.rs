use crate::matrix::{dot, Cholesky, Matrix};

use super::{class_priors, softmax_present};

/// Linear discriminant with a pooled covariance shrunk towards a scaled
/// identity: `Σ = S + r·I`, `r = ridge · mean(nonzero diag(S))`.
///
/// When there are more features than instances, `S` has rank below `n`
/// and `Σ⁻¹` is applied through the Woodbury identity, so the `n × n`
/// matrix is never formed.
#[derive(Debug, Clone)]
pub(crate) struct Ldc {
    // per class: weight vector Σ⁻¹μ_k and offset -½ μ_kᵀΣ⁻¹μ_k + ln π_k
    weights: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    present: Vec<bool>,
}

impl Ldc {
    pub(crate) fn fit(x: &Matrix, y: &[usize], n_classes: usize, ridge: f64) -> Self {
        let n = x.n_cols();
        let rows = x.n_rows();
        let priors = class_priors(y, n_classes);
        let present: Vec<bool> = priors.iter().map(|&p| p > 0.0).collect();
        let n_present = present.iter().filter(|&&p| p).count();

        let mut means = vec![vec![0.0; n]; n_classes];
        let mut counts = vec![0usize; n_classes];
        for i in 0..rows {
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

        let dof = rows.saturating_sub(n_present).max(1) as f64;
        let mut centred = Vec::with_capacity(rows * n);
        for i in 0..rows {
            centred.extend(x.row(i).iter().zip(&means[y[i]]).map(|(v, m)| v - m));
        }
        let centred = Matrix::new(rows, n, centred);

        let mut var_sum = 0.0;
        let mut nonzero = 0usize;
        for j in 0..n {
            let s: f64 = (0..rows).map(|i| centred.get(i, j).powi(2)).sum::<f64>() / dof;
            if s > 0.0 {
                var_sum += s;
                nonzero += 1;
            }
        }
        let mean_var = if nonzero > 0 { var_sum / nonzero as f64 } else { 0.0 };
        let mut r = ridge * mean_var;
        if r <= 0.0 {
            r = 1e-12 * mean_var.max(1.0);
        }

        let solve: Box<dyn Fn(&[f64]) -> Vec<f64>> = if n <= rows {
            let mut sigma = Matrix::zeros(n, n);
            for a in 0..n {
                for b in 0..=a {
                    let s: f64 = (0..rows)
                        .map(|i| centred.get(i, a) * centred.get(i, b))
                        .sum::<f64>()
                        / dof;
                    sigma.set(a, b, s);
                    sigma.set(b, a, s);
                }
                sigma.set(a, a, sigma.get(a, a) + r);
            }
            let chol = Cholesky::factor(&sigma).expect("ridge-regularised covariance is SPD");
            Box::new(move |v| chol.solve(v))
        } else {
            // Σ⁻¹v = (v - Xcᵀ M⁻¹ Xc v / dof) / r  with  M = r·I + Xc Xcᵀ / dof
            let mut m = Matrix::zeros(rows, rows);
            for a in 0..rows {
                for b in 0..=a {
                    let s = dot(centred.row(a), centred.row(b)) / dof;
                    m.set(a, b, s);
                    m.set(b, a, s);
                }
                m.set(a, a, m.get(a, a) + r);
            }
            let chol = Cholesky::factor(&m).expect("ridge-regularised Gram matrix is SPD");
            let centred = centred.clone();
            Box::new(move |v: &[f64]| {
                let xv: Vec<f64> = (0..rows).map(|i| dot(centred.row(i), v)).collect();
                let t = chol.solve(&xv);
                let mut out = v.to_vec();
                for i in 0..rows {
                    let c = t[i] / dof;
                    if c != 0.0 {
                        for (o, xc) in out.iter_mut().zip(centred.row(i)) {
                            *o -= c * xc;
                        }
                    }
                }
                out.iter_mut().for_each(|o| *o /= r);
                out
            })
        };

        let mut weights = vec![Vec::new(); n_classes];
        let mut offsets = vec![0.0; n_classes];
        for k in 0..n_classes {
            if !present[k] {
                continue;
            }
            let a = solve(&means[k]);
            offsets[k] = -0.5 * dot(&means[k], &a) + priors[k].ln();
            weights[k] = a;
        }
        Ldc {
            weights,
            offsets,
            present,
        }
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        let scores: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.offsets)
            .zip(&self.present)
            .map(|((w, b), &p)| if p { dot(w, q) + b } else { 0.0 })
            .collect();
        softmax_present(&scores, &self.present)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Both solver paths must agree when n is just above / below N.
    #[test]
    fn woodbury_matches_direct() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| ((i * 7 + j * 3) % 11) as f64 * 0.3 + (i as f64) * 0.1)
                    .collect()
            })
            .collect();
        let y = vec![0, 0, 0, 1, 1, 1];
        let x = Matrix::from_rows(&rows);
        let direct = Ldc::fit(&x, &y, 2, 1e-3);
        let mut wide_rows = rows.clone();
        for r in &mut wide_rows {
            r.push(0.0);
        }
        let wide = Ldc::fit(&Matrix::from_rows(&wide_rows), &y, 2, 1e-3);
        for q in &rows {
            let mut qw = q.clone();
            qw.push(0.0);
            let a = direct.posterior(q);
            let b = wide.posterior(&qw);
            assert!((a[0] - b[0]).abs() < 1e-8, "{a:?} {b:?}");
        }
    }
}
