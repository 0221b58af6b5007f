//! Labelled numeric datasets: loading, validation, class restriction,
//! stratified probe/holdout splitting and synthetic generators.

mod csv_io;
pub mod synth;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::subset::FeatureSubset;

pub use csv_io::{load_csv, read_csv, write_csv, LabelColumn};

/// Labelled instance matrix. Rows are instances, columns are features.
///
/// Labels are indices into `class_names`, which is kept in lexicographic
/// order so that class index order is deterministic across loads.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Matrix,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Matrix,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let d = Dataset {
            name: name.into(),
            features,
            labels,
            feature_names,
            class_names,
        };
        d.validate()?;
        Ok(d)
    }

    /// Builds a dataset from string labels; class names are the sorted
    /// distinct labels.
    pub fn from_labelled_rows(
        name: impl Into<String>,
        features: Matrix,
        labels: &[String],
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let mut class_names: Vec<String> = labels.to_vec();
        class_names.sort();
        class_names.dedup();
        let idx: BTreeMap<&str, usize> = class_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let labels = labels.iter().map(|l| idx[l.as_str()]).collect();
        Dataset::new(name, features, labels, feature_names, class_names)
    }

    fn validate(&self) -> Result<()> {
        let n = self.features.n_rows();
        if n < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 instances, got {n}"
            )));
        }
        if self.features.n_cols() < 1 {
            return Err(Error::InvalidDataset("need at least 1 feature".into()));
        }
        if self.labels.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {n} rows",
                self.labels.len()
            )));
        }
        if self.feature_names.len() != self.features.n_cols() {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                self.feature_names.len(),
                self.features.n_cols()
            )));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.class_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "label index {bad} outside {} classes",
                self.class_names.len()
            )));
        }
        if self.class_names.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 classes, got {}",
                self.class_names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.feature_names {
            if !seen.insert(f.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate feature name {f:?}"
                )));
            }
        }
        for (k, v) in self.features.data().iter().enumerate() {
            if !v.is_finite() {
                let (r, c) = (k / self.features.n_cols(), k % self.features.n_cols());
                return Err(Error::InvalidDataset(format!(
                    "non-finite value at ({r}, {c})"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n_instances(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Feature matrix restricted to the subset's columns, in subset order.
    pub fn project(&self, subset: &FeatureSubset) -> Result<Matrix> {
        self.check_subset(subset)?;
        Ok(self.features.select_cols(subset.indices()))
    }

    pub fn check_subset(&self, subset: &FeatureSubset) -> Result<()> {
        match subset.max_index() {
            Some(m) if m >= self.n_features() => Err(Error::invalid(format!(
                "feature index {m} out of range for {} features",
                self.n_features()
            ))),
            _ => Ok(()),
        }
    }

    /// New dataset holding the given rows (in the given order). Class
    /// names are kept even if some class ends up empty.
    pub fn subset_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select_rows(rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn without_row(&self, skip: usize) -> Dataset {
        let mut labels = self.labels.clone();
        labels.remove(skip);
        Dataset {
            name: self.name.clone(),
            features: self.features.without_row(skip),
            labels,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Keeps the given columns, renaming nothing.
    pub fn subset_features(&self, subset: &FeatureSubset) -> Result<Dataset> {
        let features = self.project(subset)?;
        Ok(Dataset {
            name: self.name.clone(),
            features,
            labels: self.labels.clone(),
            feature_names: subset
                .indices()
                .iter()
                .map(|&i| self.feature_names[i].clone())
                .collect(),
            class_names: self.class_names.clone(),
        })
    }
}

/// Keeps only the instances of the two most frequent classes.
///
/// Frequency ties are broken by class-name order. The result keeps the
/// surviving classes in their original (lexicographic) order.
pub fn restrict_to_top2_classes(d: &Dataset) -> Dataset {
    let counts = d.class_counts();
    if d.n_classes() <= 2 {
        return d.clone();
    }
    let mut order: Vec<usize> = (0..d.n_classes()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then_with(|| d.class_names[a].cmp(&d.class_names[b]))
    });
    let mut keep = [order[0], order[1]];
    keep.sort_unstable();
    let rows: Vec<usize> = (0..d.n_instances())
        .filter(|&i| keep.contains(&d.labels[i]))
        .collect();
    let remap = |l: usize| if l == keep[0] { 0 } else { 1 };
    Dataset {
        name: d.name.clone(),
        features: d.features.select_rows(&rows),
        labels: rows.iter().map(|&r| remap(d.labels[r])).collect(),
        feature_names: d.feature_names.clone(),
        class_names: vec![
            d.class_names[keep[0]].clone(),
            d.class_names[keep[1]].clone(),
        ],
    }
}

/// Small probe sample `Z` plus the withheld remainder used as a proxy for
/// the population.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub probe: Dataset,
    pub holdout: Dataset,
    /// Source row indices of the probe, ascending.
    pub probe_rows: Vec<usize>,
}

/// Draws `per_class` instances of every class uniformly without
/// replacement. Every class must keep at least one instance in the holdout.
pub fn stratified_split(d: &Dataset, per_class: usize, seed: u64) -> Result<SplitPair> {
    let counts = d.class_counts();
    if per_class == 0 {
        return Err(Error::invalid("per_class must be at least 1"));
    }
    for (k, &c) in counts.iter().enumerate() {
        if c <= per_class {
            return Err(Error::invalid(format!(
                "class {:?} has {c} instances; need more than per_class={per_class}",
                d.class_names[k]
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe_rows = Vec::with_capacity(per_class * d.n_classes());
    for k in 0..d.n_classes() {
        let mut members: Vec<usize> = (0..d.n_instances()).filter(|&i| d.labels[i] == k).collect();
        members.shuffle(&mut rng);
        probe_rows.extend_from_slice(&members[..per_class]);
    }
    probe_rows.sort_unstable();
    let mut in_probe = vec![false; d.n_instances()];
    for &r in &probe_rows {
        in_probe[r] = true;
    }
    let holdout_rows: Vec<usize> = (0..d.n_instances()).filter(|&i| !in_probe[i]).collect();
    Ok(SplitPair {
        probe: d.subset_rows(&probe_rows),
        holdout: d.subset_rows(&holdout_rows),
        probe_rows,
    })
}
