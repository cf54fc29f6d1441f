use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::parse_key_values;
use super::run::{ArtifactKind, RunManifest};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointComparison {
    pub iteration: u64,
    /// Generalized-region mean variance of each run; `None` when the run had
    /// too few replicates to measure it.
    pub variance_a: Option<f64>,
    pub variance_b: Option<f64>,
    /// `variance_a / variance_b`, undefined when either side is missing or
    /// the denominator is zero.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunComparison {
    pub run_a: PathBuf,
    pub run_b: PathBuf,
    pub checkpoints: Vec<CheckpointComparison>,
}

impl RunComparison {
    pub fn to_text(&self) -> String {
        let opt =
            |v: Option<f64>| v.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.16e}"));
        let mut out = String::new();
        writeln!(out, "run_a = {}", self.run_a.display()).unwrap();
        writeln!(out, "run_b = {}", self.run_b.display()).unwrap();
        for c in &self.checkpoints {
            let it = c.iteration;
            writeln!(
                out,
                "checkpoint.{it}.generalized_variance_a = {}",
                opt(c.variance_a)
            )
            .unwrap();
            writeln!(
                out,
                "checkpoint.{it}.generalized_variance_b = {}",
                opt(c.variance_b)
            )
            .unwrap();
            writeln!(out, "checkpoint.{it}.ratio = {}", opt(c.ratio)).unwrap();
        }
        out
    }

    pub fn final_ratio(&self) -> Option<f64> {
        self.checkpoints.last().and_then(|c| c.ratio)
    }
}

/// Generalized-region variance per checkpoint, read from the run's reports.
fn generalized_variances(manifest_path: &Path) -> Result<Vec<(u64, Option<f64>)>> {
    let manifest = RunManifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new(""));
    let mut rows = Vec::new();
    for artifact in manifest.artifacts_of(ArtifactKind::RandomnessReport) {
        let iteration = artifact.iteration.ok_or_else(|| {
            Error::format(
                "run manifest",
                format!("report {} has no iteration", artifact.path),
            )
        })?;
        let path = root.join(&artifact.path);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let fields = parse_key_values(&text);
        let value =
            match fields.get("mean_variance_generalized") {
                Some(v) => Some(v.parse::<f64>().map_err(|_| {
                    Error::format("randomness report", format!("bad variance {v:?}"))
                })?),
                None => None,
            };
        rows.push((iteration, value));
    }
    rows.sort_by_key(|r| r.0);
    if rows
        .iter()
        .map(|r| r.0)
        .ne(manifest.checkpoints.iter().copied())
    {
        return Err(Error::format(
            "run manifest",
            format!(
                "{} reports do not cover the checkpoint schedule",
                manifest_path.display()
            ),
        ));
    }
    Ok(rows)
}

/// Per checkpoint, the generalized-region variance of run A, of run B and
/// their ratio A/B.
pub fn compare_runs(manifest_a: &Path, manifest_b: &Path) -> Result<RunComparison> {
    let a = generalized_variances(manifest_a)?;
    let b = generalized_variances(manifest_b)?;
    if a.iter().map(|r| r.0).ne(b.iter().map(|r| r.0)) {
        return Err(Error::domain("runs have different checkpoint schedules"));
    }
    let checkpoints = a
        .into_iter()
        .zip(b)
        .map(|((iteration, va), (_, vb))| CheckpointComparison {
            iteration,
            variance_a: va,
            variance_b: vb,
            ratio: match (va, vb) {
                (Some(x), Some(y)) if y > 0.0 => Some(x / y),
                _ => None,
            },
        })
        .collect();
    Ok(RunComparison {
        run_a: manifest_a.to_owned(),
        run_b: manifest_b.to_owned(),
        checkpoints,
    })
}
