//! Sample sizes needed to tell the better of two features apart.
//!
//! Two settings are covered. With counting (correct/incorrect) outcomes the
//! McNemar statistic gives
//!
//! ```text
//! N = F_chi2^-1(1 - alpha; 1) * (p1 + p2 - 2 d) / (p1 - p2)^2
//! ```
//!
//! where `d` is the probability that both single-feature classifiers are
//! correct. With continuous correctness scores and a normal approximation
//!
//! ```text
//! N_c = Phi^-1(1 - alpha) * (var1 + var2 - 2 cov) / (p1 - p2)^2
//! ```
//!
//! which is a lower bound on what a signed-rank test would need.

pub mod quantile;

use serde::Serialize;

use crate::error::{Error, Result};

pub use quantile::{chi2_cdf, chi2_inv_cdf, chi2_sf, normal_cdf, normal_inv_cdf};

/// Inputs to the counting (McNemar) sample-size formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McNemarPlan {
    p1: f64,
    p2: f64,
    d_agree: f64,
    alpha: f64,
}

impl McNemarPlan {
    /// Validates `0 < p2 < p1 < 1`, `max(0, p1 + p2 - 1) <= d_agree <= p2`
    /// and `0 < alpha < 1`. Equal probabilities are reported as
    /// [`Error::NoDetectableDifference`].
    pub fn new(p1: f64, p2: f64, d_agree: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha {alpha} outside (0, 1)")));
        }
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(format!("{name} = {p} outside (0, 1)")));
            }
        }
        if p1 == p2 {
            return Err(Error::NoDetectableDifference);
        }
        if p1 < p2 {
            return Err(Error::invalid(format!(
                "p1 ({p1}) must exceed p2 ({p2}); swap the features"
            )));
        }
        let lo = (p1 + p2 - 1.0).max(0.0);
        // Tolerate rounding on the boundaries, e.g. d = p2 computed as a product.
        let slack = 1e-12;
        if d_agree < lo - slack || d_agree > p2 + slack {
            return Err(Error::invalid(format!(
                "d_agree {d_agree} outside [{lo}, {p2}]"
            )));
        }
        Ok(McNemarPlan {
            p1,
            p2,
            d_agree: d_agree.clamp(lo, p2),
            alpha,
        })
    }

    /// Plan with `d = p1 * p2`, i.e. independent single-feature outcomes.
    pub fn independent(p1: f64, p2: f64, alpha: f64) -> Result<Self> {
        McNemarPlan::new(p1, p2, p1 * p2, alpha)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn d_agree(&self) -> f64 {
        self.d_agree
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Joint outcome probabilities `[a, b, c, d]`: both wrong, only the
    /// first right, only the second right, both right.
    pub fn cell_probabilities(&self) -> [f64; 4] {
        let d = self.d_agree;
        let b = self.p1 - d;
        let c = self.p2 - d;
        [1.0 - b - c - d, b, c, d]
    }

    /// Expected contingency counts `[A, B, C, D]` for a sample of size `n`.
    pub fn expected_counts(&self, n: f64) -> [f64; 4] {
        self.cell_probabilities().map(|p| p * n)
    }

    /// McNemar statistic `(B - C)^2 / (B + C)` with counts approximated by
    /// `n` times the cell probabilities.
    pub fn chi_square_at(&self, n: f64) -> f64 {
        let [_, b, c, _] = self.expected_counts(n);
        if b + c == 0.0 {
            return f64::INFINITY;
        }
        (b - c).powi(2) / (b + c)
    }
}

/// Required sample size for the counting estimator, as a real number.
pub fn mcnemar_sample_size(plan: &McNemarPlan) -> Result<f64> {
    let crit = chi2_inv_cdf(1.0 - plan.alpha, 1)?;
    let gap = plan.p1 - plan.p2;
    Ok(crit * (plan.p1 + plan.p2 - 2.0 * plan.d_agree) / (gap * gap))
}

/// Inputs to the normal-approximation sample-size formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedPlan {
    p1: f64,
    p2: f64,
    var1: f64,
    var2: f64,
    cov: f64,
    alpha: f64,
    two_tailed: bool,
}

impl SmoothedPlan {
    pub fn new(
        p1: f64,
        p2: f64,
        var1: f64,
        var2: f64,
        cov: f64,
        alpha: f64,
        two_tailed: bool,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha {alpha} outside (0, 1)")));
        }
        if p1 == p2 {
            return Err(Error::NoDetectableDifference);
        }
        if p1 < p2 {
            return Err(Error::invalid(format!("p1 ({p1}) must exceed p2 ({p2})")));
        }
        if var1 < 0.0 || var2 < 0.0 {
            return Err(Error::invalid("variances must be non-negative"));
        }
        let bound = (var1 * var2).sqrt();
        if cov.abs() > bound * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::invalid(format!(
                "|cov| = {} exceeds sqrt(var1 * var2) = {bound}",
                cov.abs()
            )));
        }
        Ok(SmoothedPlan {
            p1,
            p2,
            var1,
            var2,
            cov,
            alpha,
            two_tailed,
        })
    }

    pub fn with_two_tailed(mut self, two_tailed: bool) -> Self {
        self.two_tailed = two_tailed;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn two_tailed(&self) -> bool {
        self.two_tailed
    }

    /// Variance of the paired difference `v1 - v2`.
    pub fn difference_variance(&self) -> f64 {
        self.var1 + self.var2 - 2.0 * self.cov
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothedSampleSize {
    pub n: f64,
    /// Set when the difference variance is not positive and `n` was forced to 0.
    pub degenerate_variance: bool,
}

/// Required sample size for a continuous (smoothed) correctness score.
pub fn smoothed_sample_size(plan: &SmoothedPlan) -> Result<SmoothedSampleSize> {
    let var = plan.difference_variance();
    if var <= 1e-15 {
        log::warn!("difference variance {var} is not positive; returning N_c = 0");
        return Ok(SmoothedSampleSize {
            n: 0.0,
            degenerate_variance: true,
        });
    }
    let a = if plan.two_tailed {
        plan.alpha / 2.0
    } else {
        plan.alpha
    };
    let z = normal_inv_cdf(1.0 - a)?;
    let gap = plan.p1 - plan.p2;
    Ok(SmoothedSampleSize {
        n: z * var / (gap * gap),
        degenerate_variance: false,
    })
}

/// How the agreement probability is set for each point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Agreement {
    /// `d = p1 * p2`
    Independent,
    Custom(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p1: f64,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

/// Evaluates the counting formula over a grid of `p1` values with
/// `p2 = p1 - gap`, once per significance level. Rows are ordered by alpha
/// (as given) and then by `p1`.
pub fn sample_size_curve(
    p1_grid: &[f64],
    gap: f64,
    alphas: &[f64],
    agreement: Agreement,
) -> Result<Vec<CurvePoint>> {
    if gap <= 0.0 {
        return Err(Error::invalid("gap must be positive"));
    }
    let mut out = Vec::with_capacity(p1_grid.len() * alphas.len());
    for &alpha in alphas {
        for &p1 in p1_grid {
            let p2 = p1 - gap;
            if p2 <= 0.0 {
                return Err(Error::invalid(format!("p1 = {p1} leaves p2 = {p2} <= 0")));
            }
            let d = match agreement {
                Agreement::Independent => p1 * p2,
                Agreement::Custom(d) => d,
            };
            let plan = McNemarPlan::new(p1, p2, d, alpha)?;
            out.push(CurvePoint {
                p1,
                alpha,
                n: mcnemar_sample_size(&plan)?,
            });
        }
    }
    Ok(out)
}

/// Evenly spaced grid `from, from + step, ...` up to and including `to`
/// (within a small tolerance).
pub fn linspace_step(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| from + i as f64 * step).collect()
}
