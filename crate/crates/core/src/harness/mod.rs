//! Benchmark grid and the sonar case study.
//!
//! Each (dataset, run) draws one probe of `per_class` instances per class
//! (after keeping the two most frequent classes) with the seed
//! [`cell_seed`](crate::seed::cell_seed)`(master, dataset, run)`. Every
//! classifier, ranker and scheme of that run shares the probe, the seed and
//! the rankings. The work unit is one (dataset, run, classifier), which
//! lets all its cells share one criterion cache.

mod case_study;
mod grid;
mod manifest;

pub use case_study::{sonar_case_study, BestRow, CaseStudy, CaseStudyRow};
pub use grid::{
    csv_path_for, read_jsonl, run_grid, run_grid_to_file, sort_records, to_jsonl, write_csv_export,
    GridConfig, GridSummary, RecordKey, RunRecord,
};
pub use manifest::{load_manifest, parse_manifest, ManifestEntry};
