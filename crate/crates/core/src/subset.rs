use std::fmt;

use serde::{Deserialize, Serialize};

/// Ordered set of feature (column) indices into a [`Dataset`](crate::Dataset).
///
/// Order is meaningful: subsets produced by a ranker keep rank order. Two
/// subsets with the same members in a different order are different values
/// but share a [`key`](FeatureSubset::key).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    /// Panics on duplicate indices.
    pub fn new(indices: Vec<usize>) -> Self {
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        assert!(
            sorted.windows(2).all(|w| w[0] != w[1]),
            "duplicate feature index in subset"
        );
        FeatureSubset(indices)
    }

    pub fn empty() -> Self {
        FeatureSubset(Vec::new())
    }

    pub fn all(n_features: usize) -> Self {
        FeatureSubset((0..n_features).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.contains(&idx)
    }

    /// Sorted member list; identical for subsets with equal membership.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.0.clone();
        k.sort_unstable();
        k
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }
}

impl From<Vec<usize>> for FeatureSubset {
    fn from(v: Vec<usize>) -> Self {
        FeatureSubset::new(v)
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}
