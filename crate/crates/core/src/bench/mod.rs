//! Experiment grids over solvers, features and corruption levels, and their reports.
//!
//! Seeds are derived with [`crate::rng::derive_seed`]:
//!
//! * synthetic dataset of trial `t`: `["dataset", master, t]` unless the config fixes one;
//! * train/test split of trial `t`: `["split", split.seed or master, t]`;
//! * corruption stream of a level: `[master, "shared", "shared", corruption_id, t]`, with
//!   the classifier and feature slots shared so every method sees the same test images;
//! * test image `j` within a stream: `[stream, j]`.

mod config;
mod report;
mod run;
mod selftest;

pub use config::{
    feature_id, ClassifierConfig, CorruptionConfig, DatasetConfig, ExperimentConfig, Method, SplitConfig,
    SplitModeName, SyntheticConfig, DEFAULT_EPSILON, DEFAULT_NS_DIM,
};
pub use report::{emit_report, render, render_csv, render_json, render_markdown, ReportFormat, CSV_HEADER};
pub use run::{
    config_hash, corruption_seed, dataset_seed, run_experiment, split_seed, CellResult, ExperimentReport,
    ReportMetadata, TrialSeeds, SHARED,
};
pub use selftest::{planted_instance, selftest, PlantedInstance, SelftestReport};
