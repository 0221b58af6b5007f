//! Tunable settings for classifiers and rankers, with the flat
//! `key = value` override format used by config files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every tunable knob. Defaults reproduce the documented behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    /// `ldc.ridge`: shrinkage added to the pooled covariance diagonal, as a
    /// fraction of the mean per-feature variance.
    pub ldc_ridge: f64,
    /// `nb.var_floor`: per class-feature variance floor as a fraction of the
    /// squared feature range.
    pub nb_var_floor: f64,
    /// `dt.min_split`: nodes with fewer instances become leaves.
    pub dt_min_split: usize,
    /// `rf.trees`
    pub rf_trees: usize,
    /// `svm.c`
    pub svm_c: f64,
    /// `svm.tol`: KKT violation tolerance of the SMO solver.
    pub svm_tol: f64,
    /// `svm.gamma`: RBF width; 0 means `1 / |subset|`.
    pub svm_gamma: f64,
    /// `svm.max_iter`
    pub svm_max_iter: usize,
    /// `su.bins`: equal-frequency bins; 0 means `ceil(sqrt(N))`.
    pub su_bins: usize,
    /// `relieff.k`: nearest hits/misses per instance.
    pub relieff_k: usize,
    /// `rf_imp.trees`
    pub rf_imp_trees: usize,
    /// `rfe.halve_until`: SVM-RFE halves the feature set while more than
    /// this many remain, then drops one feature per step.
    pub rfe_halve_until: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            ldc_ridge: 1e-3,
            nb_var_floor: 1e-9,
            dt_min_split: 2,
            rf_trees: 100,
            svm_c: 1.0,
            svm_tol: 1e-3,
            svm_gamma: 0.0,
            svm_max_iter: 100_000,
            su_bins: 0,
            relieff_k: 3,
            rf_imp_trees: 100,
            rfe_halve_until: 40,
        }
    }
}

pub const KEYS: &[&str] = &[
    "ldc.ridge",
    "nb.var_floor",
    "dt.min_split",
    "rf.trees",
    "svm.c",
    "svm.tol",
    "svm.gamma",
    "svm.max_iter",
    "su.bins",
    "relieff.k",
    "rf_imp.trees",
    "rfe.halve_until",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
}

impl Hyperparams {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "ldc.ridge" => self.ldc_ridge = parse(key, v)?,
            "nb.var_floor" => self.nb_var_floor = parse(key, v)?,
            "dt.min_split" => self.dt_min_split = parse(key, v)?,
            "rf.trees" => self.rf_trees = parse(key, v)?,
            "svm.c" => self.svm_c = parse(key, v)?,
            "svm.tol" => self.svm_tol = parse(key, v)?,
            "svm.gamma" => self.svm_gamma = parse(key, v)?,
            "svm.max_iter" => self.svm_max_iter = parse(key, v)?,
            "su.bins" => self.su_bins = parse(key, v)?,
            "relieff.k" => self.relieff_k = parse(key, v)?,
            "rf_imp.trees" => self.rf_imp_trees = parse(key, v)?,
            "rfe.halve_until" => self.rfe_halve_until = parse(key, v)?,
            other => {
                return Err(Error::invalid(format!(
                    "unknown config key {other:?}; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rf_trees == 0 || self.rf_imp_trees == 0 {
            return Err(Error::invalid("forests need at least one tree"));
        }
        if self.svm_c <= 0.0 || self.svm_tol <= 0.0 {
            return Err(Error::invalid("svm.c and svm.tol must be positive"));
        }
        if self.relieff_k == 0 {
            return Err(Error::invalid("relieff.k must be positive"));
        }
        if self.dt_min_split < 2 {
            return Err(Error::invalid("dt.min_split must be at least 2"));
        }
        if self.ldc_ridge < 0.0 || self.nb_var_floor < 0.0 || self.svm_gamma < 0.0 {
            return Err(Error::invalid("ridge, variance floor and gamma must be non-negative"));
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut h = Hyperparams::default();
        h.apply_overrides(&text)?;
        Ok(h)
    }

    /// Resolved settings in the same `key=value` format, one per line.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let pairs: [(&str, String); 12] = [
            ("ldc.ridge", self.ldc_ridge.to_string()),
            ("nb.var_floor", self.nb_var_floor.to_string()),
            ("dt.min_split", self.dt_min_split.to_string()),
            ("rf.trees", self.rf_trees.to_string()),
            ("svm.c", self.svm_c.to_string()),
            ("svm.tol", self.svm_tol.to_string()),
            ("svm.gamma", self.svm_gamma.to_string()),
            ("svm.max_iter", self.svm_max_iter.to_string()),
            ("su.bins", self.su_bins.to_string()),
            ("relieff.k", self.relieff_k.to_string()),
            ("rf_imp.trees", self.rf_imp_trees.to_string()),
            ("rfe.halve_until", self.rfe_halve_until.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_round_trip() {
        let mut h = Hyperparams::default();
        h.apply_overrides("rf.trees = 10  # fewer trees\n\nsvm.c=2.5\n").unwrap();
        assert_eq!(h.rf_trees, 10);
        assert_eq!(h.svm_c, 2.5);
        let mut g = Hyperparams::default();
        g.apply_overrides(&h.to_config_string()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut h = Hyperparams::default();
        assert!(h.set("rf.depth", "3").is_err());
        assert!(h.set("rf.trees", "lots").is_err());
        assert!(h.set("rf.trees", "0").is_err());
    }
}
