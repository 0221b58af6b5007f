//! Synthetic datasets: the classifier-dependence pair and Gaussian
//! problems used by the estimator experiments and the desk benchmark.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::Dataset;

/// Which classifier the generated two-feature pair favours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DependenceMode {
    /// Zero LOO error for the linear discriminant, total failure for 1-NN.
    LdcWins,
    /// Zero LOO error for 1-NN, total failure for the linear discriminant.
    NnWins,
}

impl FromStr for DependenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ldc-wins" | "a" => Ok(DependenceMode::LdcWins),
            "nn-wins" | "1nn-wins" | "b" => Ok(DependenceMode::NnWins),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for DependenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependenceMode::LdcWins => "ldc-wins",
            DependenceMode::NnWins => "nn-wins",
        })
    }
}

/// Two features, two classes, each feature useless on its own; the pair is
/// only useful to one of the two classifiers depending on `mode`.
///
/// `LdcWins`: two parallel rows of points tilted at 45 degrees. Classes sit
/// a quarter-spacing apart across the rows and half a spacing apart along
/// them, so every nearest neighbour is of the opposite class while a single
/// line separates the rows.
///
/// `NnWins`: four clusters in an XOR layout, each a tight same-class pair.
/// Class means coincide, so removing any point drags its class mean away
/// from it and the refitted discriminant assigns it to the other class.
/// Cluster corners are offset so that both 1-D projections interleave the
/// classes.
pub fn generate_classifier_dependent_pair(mode: DependenceMode, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let mut points: Vec<(f64, f64, &str)> = Vec::new();
    match mode {
        DependenceMode::LdcWins => {
            let per_class = rng.gen_range(8..=12);
            let spacing: f64 = rng.gen_range(0.5..2.0);
            let gap = spacing / 4.0;
            let jitter = 0.05 * spacing;
            let along = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
            let across = (-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
            for i in 0..per_class {
                let t = i as f64 * spacing + rng.gen_range(-jitter..jitter);
                points.push((t * along.0, t * along.1, "A"));
                let t = (i as f64 + 0.5) * spacing + rng.gen_range(-jitter..jitter);
                points.push((
                    t * along.0 + gap * across.0,
                    t * along.1 + gap * across.1,
                    "B",
                ));
            }
        }
        DependenceMode::NnWins => {
            let side: f64 = rng.gen_range(3.0..6.0);
            let pair: f64 = rng.gen_range(0.1..0.3);
            let nudge = 0.1 * pair;
            let corners = [
                ((0.0, 0.0), "A"),
                ((nudge, side), "B"),
                ((side, nudge), "B"),
                ((side + nudge, side + nudge), "A"),
            ];
            for ((cx, cy), class) in corners {
                for k in 0..2 {
                    let off = k as f64 * pair;
                    let jx = rng.gen_range(-0.02..0.02) * pair;
                    let jy = rng.gen_range(-0.02..0.02) * pair;
                    points.push((cx + off + jx, cy + off + jy, class));
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&(x, y, _)| vec![x + shift.0, y + shift.1])
        .collect();
    let labels: Vec<String> = points.iter().map(|p| p.2.to_string()).collect();
    Dataset::from_labelled_rows(
        format!("fig3-{mode}"),
        Matrix::from_rows(&rows),
        &labels,
        vec!["x1".into(), "x2".into()],
    )
    .expect("generated pair is valid")
}

/// Parameters of a two-class Gaussian problem with unit-variance features.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProblem {
    pub per_class: usize,
    pub n_features: usize,
    /// The first `n_informative` features carry the class signal.
    pub n_informative: usize,
    /// Distance between the class means along each informative feature.
    pub separation: f64,
    /// Correlation between consecutive informative features (0 = independent).
    pub informative_correlation: f64,
}

impl GaussianProblem {
    pub fn new(per_class: usize, n_features: usize, n_informative: usize, separation: f64) -> Self {
        GaussianProblem {
            per_class,
            n_features,
            n_informative,
            separation,
            informative_correlation: 0.0,
        }
    }

    pub fn generate(&self, name: &str, seed: u64) -> Dataset {
        assert!(self.n_informative <= self.n_features);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(2 * self.per_class);
        let mut labels = Vec::with_capacity(2 * self.per_class);
        let rho = self.informative_correlation;
        let keep = (1.0 - rho * rho).sqrt();
        for i in 0..2 * self.per_class {
            let class = i % 2;
            let sign = if class == 0 { -0.5 } else { 0.5 };
            let mut row = Vec::with_capacity(self.n_features);
            let mut prev = 0.0;
            for j in 0..self.n_features {
                let z: f64 = rng.sample(StandardNormal);
                if j < self.n_informative {
                    let e = if j == 0 { z } else { rho * prev + keep * z };
                    prev = e;
                    row.push(e + sign * self.separation);
                } else {
                    row.push(z);
                }
            }
            rows.push(row);
            labels.push(if class == 0 { "neg" } else { "pos" }.to_string());
        }
        let names = (0..self.n_features).map(|j| format!("g{}", j + 1)).collect();
        Dataset::from_labelled_rows(name, Matrix::from_rows(&rows), &labels, names)
            .expect("generated dataset is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_is_deterministic() {
        for mode in [DependenceMode::LdcWins, DependenceMode::NnWins] {
            assert_eq!(
                generate_classifier_dependent_pair(mode, 3),
                generate_classifier_dependent_pair(mode, 3)
            );
        }
    }

    #[test]
    fn pair_shape() {
        let d = generate_classifier_dependent_pair(DependenceMode::NnWins, 1);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.class_counts(), vec![4, 4]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("ldc-wins".parse::<DependenceMode>().unwrap(), DependenceMode::LdcWins);
        assert_eq!("nn_wins".parse::<DependenceMode>().unwrap(), DependenceMode::NnWins);
        assert!("x".parse::<DependenceMode>().is_err());
    }

    #[test]
    fn gaussian_balanced() {
        let d = GaussianProblem::new(20, 20, 3, 1.0).generate("g", 9);
        assert_eq!(d.class_counts(), vec![20, 20]);
        assert_eq!(d.n_features(), 20);
    }
}
