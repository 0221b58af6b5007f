use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::seed::derive;

use super::tree::{Tree, TreeParams};

/// Bagged random-subspace trees; posterior is the mean leaf distribution.
#[derive(Debug, Clone)]
pub(crate) struct Forest {
    trees: Vec<Tree>,
    n_classes: usize,
}

impl Forest {
    /// Tree `t` draws its bootstrap sample and split candidates from its own
    /// stream `derive(seed, t)`. `ceil(sqrt(n_features))` candidates per split.
    pub(crate) fn fit(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        n_trees: usize,
        min_split: usize,
        seed: u64,
        mut importance: Option<&mut [f64]>,
    ) -> Forest {
        let n = x.n_rows();
        let params = TreeParams {
            min_split,
            max_features: Some((x.n_cols() as f64).sqrt().ceil() as usize),
        };
        let mut trees = Vec::with_capacity(n_trees);
        for t in 0..n_trees {
            let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, t as u64));
            let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            trees.push(Tree::fit(
                x,
                y,
                n_classes,
                &rows,
                &params,
                Some(&mut rng),
                importance.as_deref_mut(),
            ));
        }
        if let Some(imp) = importance {
            for v in imp.iter_mut() {
                *v /= n_trees as f64;
            }
        }
        Forest { trees, n_classes }
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (acc, v) in p.iter_mut().zip(t.leaf_distribution(q)) {
                *acc += v;
            }
        }
        let k = self.trees.len() as f64;
        for v in &mut p {
            *v /= k;
        }
        p
    }
}
