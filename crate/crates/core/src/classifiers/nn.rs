use crate::matrix::{sq_dist, Matrix};

use super::softmax_present;

/// 1-nearest-neighbour with softmax posteriors over the nearest distance to
/// each class: `p_k ∝ exp(-d_k)`.
#[derive(Debug, Clone)]
pub(crate) struct NearestNeighbour {
    x: Matrix,
    y: Vec<usize>,
    n_classes: usize,
}

impl NearestNeighbour {
    pub(crate) fn fit(x: Matrix, y: Vec<usize>, n_classes: usize) -> Self {
        NearestNeighbour { x, y, n_classes }
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        let mut nearest = vec![f64::INFINITY; self.n_classes];
        for i in 0..self.x.n_rows() {
            let d = sq_dist(self.x.row(i), q);
            let c = self.y[i];
            if d < nearest[c] {
                nearest[c] = d;
            }
        }
        let present: Vec<bool> = nearest.iter().map(|d| d.is_finite()).collect();
        let scores: Vec<f64> = nearest.iter().map(|d| -d.sqrt()).collect();
        softmax_present(&scores, &present)
    }
}
