pub mod classifiers;
pub mod cli;
pub mod config;
pub mod dataset;
mod error;
pub mod estimators;
pub mod harness;
pub mod matrix;
pub mod rankers;
pub mod report;
pub mod samplesize;
pub mod seed;
pub mod selectors;
pub mod stats;
pub mod subset;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use subset::FeatureSubset;
