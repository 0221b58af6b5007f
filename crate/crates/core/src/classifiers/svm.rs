//! C-SVM trained by sequential minimal optimisation with maximal-violating
//! pair working-set selection. Outputs are discrete votes.

use crate::config::Hyperparams;
use crate::matrix::{dot, sq_dist, Matrix};

use super::one_hot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => (-gamma * sq_dist(a, b)).exp(),
        }
    }
}

/// Dual solution: `f(x) = Σ alpha_i y_i K(x_i, x) - rho`.
#[derive(Debug, Clone)]
pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
}

/// Solves `min ½ αᵀQα - eᵀα` s.t. `0 ≤ α ≤ c`, `yᵀα = 0` with
/// `Q_ij = y_i y_j K_ij`; `y` holds ±1.
pub(crate) fn smo(kernel: &Matrix, y: &[f64], c: f64, tol: f64, max_iter: usize) -> DualSolution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel.get(i, j);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
    const TAU: f64 = 1e-12;

    for _ in 0..max_iter {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < tol {
            break;
        }
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    // rho from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    };
    DualSolution { alpha, rho }
}

pub(crate) fn kernel_matrix(x: &Matrix, kernel: Kernel) -> Matrix {
    let n = x.n_rows();
    let mut k = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let v = kernel.eval(x.row(a), x.row(b));
            k.set(a, b, v);
            k.set(b, a, v);
        }
    }
    k
}

/// Primal weights `w = Σ alpha_i y_i x_i` of a linear SVM separating
/// `positive` rows from the rest.
pub(crate) fn linear_weights(x: &Matrix, positive: &[bool], c: f64, tol: f64, max_iter: usize) -> Vec<f64> {
    let y: Vec<f64> = positive.iter().map(|&p| if p { 1.0 } else { -1.0 }).collect();
    let k = kernel_matrix(x, Kernel::Linear);
    let sol = smo(&k, &y, c, tol, max_iter);
    let mut w = vec![0.0; x.n_cols()];
    for i in 0..x.n_rows() {
        let coef = sol.alpha[i] * y[i];
        if coef != 0.0 {
            for (wj, xj) in w.iter_mut().zip(x.row(i)) {
                *wj += coef * xj;
            }
        }
    }
    w
}

#[derive(Debug, Clone)]
struct Machine {
    pos: usize,
    neg: usize,
    support: Matrix,
    coef: Vec<f64>,
    rho: f64,
}

/// One-vs-one ensemble of binary machines (a single machine for two classes).
#[derive(Debug, Clone)]
pub(crate) struct SvmClassifier {
    kernel: Kernel,
    machines: Vec<Machine>,
    n_classes: usize,
}

impl SvmClassifier {
    pub(crate) fn fit(x: Matrix, y: &[usize], n_classes: usize, kernel: Kernel, hyper: &Hyperparams) -> Self {
        let mut present: Vec<usize> = y.to_vec();
        present.sort_unstable();
        present.dedup();
        let mut machines = Vec::new();
        for (a, &pos) in present.iter().enumerate() {
            for &neg in &present[a + 1..] {
                let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == pos || y[i] == neg).collect();
                let xs = x.select_rows(&rows);
                let ys: Vec<f64> = rows.iter().map(|&i| if y[i] == pos { 1.0 } else { -1.0 }).collect();
                let k = kernel_matrix(&xs, kernel);
                let sol = smo(&k, &ys, hyper.svm_c, hyper.svm_tol, hyper.svm_max_iter);
                let sv: Vec<usize> = (0..rows.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
                machines.push(Machine {
                    pos,
                    neg,
                    support: xs.select_rows(&sv),
                    coef: sv.iter().map(|&i| sol.alpha[i] * ys[i]).collect(),
                    rho: sol.rho,
                });
            }
        }
        SvmClassifier {
            kernel,
            machines,
            n_classes,
        }
    }

    fn decision(&self, m: &Machine, q: &[f64]) -> f64 {
        (0..m.support.n_rows())
            .map(|i| m.coef[i] * self.kernel.eval(m.support.row(i), q))
            .sum::<f64>()
            - m.rho
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        let mut votes = vec![0usize; self.n_classes];
        for m in &self.machines {
            // f == 0 goes to the lower class index
            if self.decision(m, q) >= 0.0 {
                votes[m.pos] += 1;
            } else {
                votes[m.neg] += 1;
            }
        }
        let mut best = 0;
        for (k, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = k;
            }
        }
        one_hot(self.n_classes, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_linear_problem_margin() {
        // Points at -2, -1 (positive) and 1, 2 (negative): w = -1, rho = 0.
        let x = Matrix::from_rows(&[vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]]);
        let y = [1.0, 1.0, -1.0, -1.0];
        let k = kernel_matrix(&x, Kernel::Linear);
        let sol = smo(&k, &y, 10.0, 1e-6, 10_000);
        let w: f64 = (0..4).map(|i| sol.alpha[i] * y[i] * x.get(i, 0)).sum();
        assert!((w + 1.0).abs() < 1e-4, "w = {w}");
        assert!(sol.rho.abs() < 1e-4, "rho = {}", sol.rho);
        let sum: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn box_constraints_hold() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.9, 1.1], vec![0.1, -0.1], vec![0.5, 0.5]]);
        let y = [1.0, -1.0, 1.0, -1.0, 1.0];
        let k = kernel_matrix(&x, Kernel::Rbf { gamma: 0.5 });
        let sol = smo(&k, &y, 1.0, 1e-3, 100_000);
        assert!(sol.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }
}
