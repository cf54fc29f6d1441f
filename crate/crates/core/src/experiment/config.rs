use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{MaskParams, ThetaCParams, ThetaLParams};
use crate::error::{Error, Result};
use crate::geometry::StrongRegionSpec;
use crate::imaging::DiagramStyle;
use crate::network::ActivationSpec;
use crate::training::{geometric_checkpoints, SampleOrder, TrainConfig};

/// Everything one replicate experiment needs, as read from a TOML file.
///
/// See `configs/*.toml` in the crate for an annotated example of every key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub mask: MaskConfig,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub training: TrainingConfig,
    pub experiment: RunConfig,
    #[serde(default)]
    pub diagram: DiagramConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    ThetaL,
    ThetaC,
    Image,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub source: DatasetSource,
    /// Pixels per side for the generated sets.
    #[serde(default = "default_size")]
    pub size: usize,
    /// PGM file, for `source = "image"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub theta_l: ThetaLParams,
    #[serde(default)]
    pub theta_c: ThetaCParams,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSource {
    #[default]
    Generated,
    Image,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskConfig {
    #[serde(default)]
    pub source: MaskSource,
    /// PGM file whose black pixels mark the training subset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub generated: MaskParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub widths: Vec<usize>,
    pub hidden_activation: ActivationSpec,
    pub output_activation: ActivationSpec,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            widths: vec![2, 16, 16, 1],
            hidden_activation: ActivationSpec::tanh(),
            output_activation: ActivationSpec::tanh(),
        }
    }
}

impl NetworkConfig {
    pub fn activations(&self) -> Vec<ActivationSpec> {
        let layers = self.widths.len().saturating_sub(1);
        (0..layers)
            .map(|k| {
                if k + 1 == layers {
                    self.output_activation
                } else {
                    self.hidden_activation
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub total_iterations: u64,
    pub checkpoint_iterations: Vec<u64>,
    pub decay_biases: bool,
    pub sample_order: SampleOrder,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: 0.02,
            weight_decay: 2e-7,
            total_iterations: 1_000_000,
            checkpoint_iterations: geometric_checkpoints(100_000, 1_000_000, 3)
                .expect("default schedule is valid"),
            decay_biases: true,
            sample_order: SampleOrder::Uniform,
        }
    }
}

impl TrainingConfig {
    pub fn train_config(&self, sample_seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            total_iterations: self.total_iterations,
            checkpoint_iterations: self.checkpoint_iterations.clone(),
            sample_seed,
            decay_biases: self.decay_biases,
            sample_order: self.sample_order,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_replicates")]
    pub replicate_count: usize,
    /// Replicate `i` uses seed `base_seed + i` for both weight init and
    /// sample order (on separate streams).
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagramConfig {
    pub size: usize,
    pub style: DiagramStyle,
}

impl Default for DiagramConfig {
    fn default() -> Self {
        DiagramConfig {
            size: 128,
            style: DiagramStyle::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Input-space half-width of a neuron's strong-propagation band.
    pub strong_half_width: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            strong_half_width: StrongRegionSpec::DEFAULT_HALF_WIDTH,
        }
    }
}

fn default_size() -> usize {
    64
}

fn default_replicates() -> usize {
    4
}

fn default_base_seed() -> u64 {
    1
}

impl ExperimentConfig {
    /// Desk-scale defaults for one of the generated sets.
    pub fn desk_scale(source: DatasetSource, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset: DatasetConfig {
                source,
                size: default_size(),
                path: None,
                theta_l: ThetaLParams::default(),
                theta_c: ThetaCParams::default(),
            },
            mask: MaskConfig::default(),
            network: NetworkConfig::default(),
            training: TrainingConfig::default(),
            experiment: RunConfig {
                replicate_count: default_replicates(),
                base_seed: default_base_seed(),
                output_dir: output_dir.into(),
            },
            diagram: DiagramConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the directory holding the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.dataset.path.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.mask.path.as_mut() {
            rebase(p);
        }
        rebase(&mut cfg.experiment.output_dir);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Cheap structural checks; dataset and mask contents are checked when built.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let widths = &self.network.widths;
        if widths.len() < 2 || widths.contains(&0) {
            return bad(format!(
                "network widths {widths:?} need at least two positive entries"
            ));
        }
        if widths[0] != 2 || widths[widths.len() - 1] != 1 {
            return bad(format!(
                "network widths {widths:?} must start at 2 and end at 1"
            ));
        }
        for spec in [
            self.network.hidden_activation,
            self.network.output_activation,
        ] {
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.training
            .train_config(0)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.experiment.replicate_count == 0 {
            return bad("replicate_count must be at least 1".into());
        }
        if self.dataset.source == DatasetSource::Image && self.dataset.path.is_none() {
            return bad("dataset.source = \"image\" needs dataset.path".into());
        }
        if self.mask.source == MaskSource::Image && self.mask.path.is_none() {
            return bad("mask.source = \"image\" needs mask.path".into());
        }
        if self.diagram.size < 2 {
            return bad("diagram.size must be at least 2".into());
        }
        self.diagram
            .style
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        StrongRegionSpec::new(self.analysis.strong_half_width)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_desk_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            "[dataset]\nsource = \"theta_c\"\n[experiment]\noutput_dir = \"out\"\n",
        )
        .unwrap();
        assert_eq!(
            cfg,
            ExperimentConfig::desk_scale(DatasetSource::ThetaC, "out")
        );
        assert_eq!(
            cfg.training.checkpoint_iterations,
            vec![100_000, 316_228, 1_000_000]
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn serialization_round_trip() {
        let mut cfg = ExperimentConfig::desk_scale(DatasetSource::ThetaL, "x");
        cfg.network.hidden_activation = ActivationSpec::blend(0.25, true);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let err = ExperimentConfig::from_toml_str(
            "[dataset]\nsource = \"theta_c\"\ncolour = 1\n[experiment]\noutput_dir = \"o\"\n",
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = ExperimentConfig::desk_scale(DatasetSource::ThetaL, "x");
        cfg.training.checkpoint_iterations = vec![10, 5];
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::desk_scale(DatasetSource::Image, "x");
        assert!(cfg.validate().is_err());
        cfg.dataset.path = Some("a.pgm".into());
        cfg.validate().unwrap();
        cfg.experiment.replicate_count = 0;
        assert!(cfg.validate().is_err());
    }
}
