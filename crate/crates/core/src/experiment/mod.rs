//! Config-driven replicate experiments.
//!
//! [`run_experiment`] trains `replicate_count` networks that differ only in
//! their seed, snapshots each one at the configured checkpoints and measures
//! how much the sampled functions disagree inside and outside the training
//! mask. [`compare_runs`] puts two finished runs side by side.

mod compare;
mod config;
mod run;

use std::collections::BTreeMap;

pub use compare::{compare_runs, CheckpointComparison, RunComparison};
pub use config::{
    AnalysisConfig, DatasetConfig, DatasetSource, DiagramConfig, ExperimentConfig, MaskConfig,
    MaskSource, NetworkConfig, RunConfig, TrainingConfig,
};
pub use run::{
    generate_dataset_files, initial_network, prepare_data, replicate_seed, run_experiment,
    Artifact, ArtifactKind, PreparedData, ReplicateRecord, RunManifest, MANIFEST_FILE,
};

/// Parses a flat `key = value` text block. Blank lines and `#` comments are
/// skipped; later keys overwrite earlier ones.
pub fn parse_key_values(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect()
}
