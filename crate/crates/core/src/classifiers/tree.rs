//! Unpruned binary decision tree grown on information gain. Shared by the
//! DT classifier, the random forest and the forest-importance ranker.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub(crate) struct TreeParams {
    pub min_split: usize,
    /// Candidate features drawn per split; `None` tries every feature.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Vec<f64>),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
}

pub(crate) fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    n_classes: usize,
    params: &'a TreeParams,
    rng: Option<&'a mut ChaCha8Rng>,
    importance: Option<&'a mut [f64]>,
    root_size: f64,
    nodes: Vec<Node>,
    // scratch buffer reused across split searches
    pairs: Vec<(f64, usize)>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn leaf(&self, counts: &[usize], total: usize) -> Node {
        Node::Leaf(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    fn grow(&mut self, rows: Vec<usize>) -> usize {
        let mut counts = vec![0usize; self.n_classes];
        for &r in &rows {
            counts[self.y[r]] += 1;
        }
        let total = rows.len();
        let id = self.nodes.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || total < self.params.min_split {
            let leaf = self.leaf(&counts, total);
            self.nodes.push(leaf);
            return id;
        }
        let Some(best) = self.best_split(&rows, &counts) else {
            let leaf = self.leaf(&counts, total);
            self.nodes.push(leaf);
            return id;
        };
        if let Some(imp) = self.importance.as_deref_mut() {
            imp[best.feature] += best.gain * total as f64 / self.root_size;
        }
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x.get(i, best.feature) <= best.threshold);
        // placeholder, patched once both children exist
        self.nodes.push(Node::Leaf(Vec::new()));
        let left = self.grow(l);
        let right = self.grow(r);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn candidates(&mut self) -> Vec<usize> {
        let n = self.x.n_cols();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < n => {
                let mut f = sample(rng, n, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..n).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize], counts: &[usize]) -> Option<BestSplit> {
        let total = rows.len();
        let parent = entropy(counts, total);
        let mut best: Option<BestSplit> = None;
        let mut best_gain = 1e-12;
        let mut left = vec![0usize; self.n_classes];
        let mut right = vec![0usize; self.n_classes];
        for f in self.candidates() {
            self.pairs.clear();
            self.pairs
                .extend(rows.iter().map(|&r| (self.x.get(r, f), self.y[r])));
            self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if self.pairs[0].0 == self.pairs[total - 1].0 {
                continue;
            }
            left.iter_mut().for_each(|c| *c = 0);
            right.copy_from_slice(counts);
            for i in 0..total - 1 {
                let (v, c) = self.pairs[i];
                left[c] += 1;
                right[c] -= 1;
                let next = self.pairs[i + 1].0;
                if v == next {
                    continue;
                }
                let nl = i + 1;
                let nr = total - nl;
                let gain = parent
                    - (nl as f64 / total as f64) * entropy(&left, nl)
                    - (nr as f64 / total as f64) * entropy(&right, nr);
                if gain > best_gain {
                    best_gain = gain;
                    let mid = 0.5 * (v + next);
                    best = Some(BestSplit {
                        gain,
                        feature: f,
                        threshold: if mid < next { mid } else { v },
                    });
                }
            }
        }
        best
    }
}

impl Tree {
    /// Grows a tree on `rows` (which may repeat, as in a bootstrap sample).
    pub(crate) fn fit(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        rows: &[usize],
        params: &TreeParams,
        rng: Option<&mut ChaCha8Rng>,
        importance: Option<&mut [f64]>,
    ) -> Tree {
        let mut g = Grower {
            x,
            y,
            n_classes,
            params,
            rng,
            importance,
            root_size: rows.len() as f64,
            nodes: Vec::new(),
            pairs: Vec::with_capacity(rows.len()),
        };
        g.grow(rows.to_vec());
        Tree { nodes: g.nodes }
    }

    pub(crate) fn posterior(&self, q: &[f64]) -> Vec<f64> {
        self.leaf_distribution(q).to_vec()
    }

    pub(crate) fn leaf_distribution(&self, q: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(p) => return p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if q[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> TreeParams {
        TreeParams {
            min_split: 2,
            max_features: None,
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[5, 0], 5), 0.0);
        assert!((entropy(&[2, 2], 4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_data_single_split() {
        let x = Matrix::from_rows(&[vec![0.0, 5.0], vec![1.0, 3.0], vec![2.0, 4.0], vec![3.0, 9.0]]);
        let y = [0, 0, 1, 1];
        let t = Tree::fit(&x, &y, 2, &[0, 1, 2, 3], &params(), None, None);
        assert_eq!(t.n_nodes(), 3);
        assert_eq!(t.posterior(&[1.4, 0.0]), vec![1.0, 0.0]);
        assert_eq!(t.posterior(&[1.6, 0.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn unsplittable_node_keeps_distribution() {
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
        let y = [0, 1, 1];
        let t = Tree::fit(&x, &y, 2, &[0, 1, 2], &params(), None, None);
        let p = t.posterior(&[1.0]);
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn importance_credits_split_feature() {
        let x = Matrix::from_rows(&[vec![7.0, 0.0], vec![7.0, 1.0], vec![7.0, 2.0], vec![7.0, 3.0]]);
        let y = [0, 0, 1, 1];
        let mut imp = vec![0.0; 2];
        Tree::fit(&x, &y, 2, &[0, 1, 2, 3], &params(), None, Some(&mut imp));
        assert_eq!(imp[0], 0.0);
        assert!((imp[1] - 1.0).abs() < 1e-12);
    }
}
