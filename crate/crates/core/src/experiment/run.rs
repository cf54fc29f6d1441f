use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{DatasetSource, ExperimentConfig, MaskSource};
use crate::dataset::{
    build_dataset, generate_mask, generate_theta_c, generate_theta_l, load_pgm, save_pgm, Dataset,
    GrayImage, Grid, MaskImage,
};
use crate::error::{Error, Result};
use crate::geometry::{
    crossings_in_region, first_layer_lines, generalization_variance, in_strong_region,
    StrongRegionSpec,
};
use crate::imaging::{render_hyperplane_diagram, sample_raw};
use crate::network::{init_network, network_to_text, Network};
use crate::rng::GENERATOR_NAME;
use crate::training::{mean_training_error, train};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    DatasetImage,
    MaskImage,
    /// Sampled network function, clamped for display.
    FunctionImage,
    /// Unclamped sampled function as a text matrix.
    FunctionRaw,
    /// First-hidden-layer weights in the network file format.
    FirstLayerWeights,
    Diagram,
    FinalNetwork,
    RandomnessReport,
    VarianceImage,
    VarianceRaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub kind: ArtifactKind,
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub index: usize,
    pub seed: u64,
    pub initial_training_error: f64,
    pub final_training_error: f64,
}

/// Record of a finished run. Everything except `started_unix` and
/// `elapsed_seconds` is a pure function of the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub generator: String,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub checkpoints: Vec<u64>,
    pub replicates: Vec<ReplicateRecord>,
    pub artifacts: Vec<Artifact>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::format("run manifest", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest always serializes")
    }

    pub fn artifacts_of(&self, kind: ArtifactKind) -> impl Iterator<Item = &Artifact> {
        self.artifacts.iter().filter(move |a| a.kind == kind)
    }
}

/// The training image, the mask and the observations derived from them.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub image: GrayImage,
    pub mask: MaskImage,
    pub dataset: Dataset,
}

fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pgm(&bytes).map_err(|source| Error::Pgm {
        path: path.to_owned(),
        source,
    })
}

/// Builds (or loads) the dataset image and mask named by the config.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<PreparedData> {
    let ds = &cfg.dataset;
    let image = match ds.source {
        DatasetSource::ThetaL => generate_theta_l(ds.size, &ds.theta_l)?,
        DatasetSource::ThetaC => generate_theta_c(ds.size, &ds.theta_c)?,
        DatasetSource::Image => read_pgm(ds.path.as_deref().expect("validated"))?,
    };
    let mask = match cfg.mask.source {
        MaskSource::Generated => generate_mask(image.size(), &cfg.mask.generated)?,
        MaskSource::Image => {
            MaskImage::from_gray(&read_pgm(cfg.mask.path.as_deref().expect("validated"))?)?
        }
    };
    let dataset = build_dataset(&image, &mask)?;
    Ok(PreparedData {
        image,
        mask,
        dataset,
    })
}

pub fn replicate_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    cfg.experiment.base_seed.wrapping_add(index as u64)
}

/// Initial network of replicate `index`.
pub fn initial_network(cfg: &ExperimentConfig, index: usize) -> Result<Network> {
    init_network(
        &cfg.network.widths,
        &cfg.network.activations(),
        replicate_seed(cfg, index),
    )
}

struct ReplicateOutcome {
    record: ReplicateRecord,
    snapshots: Vec<(u64, Network)>,
    final_net: Network,
}

fn run_replicate(
    cfg: &ExperimentConfig,
    data: &PreparedData,
    index: usize,
) -> Result<ReplicateOutcome> {
    let seed = replicate_seed(cfg, index);
    let mut net = initial_network(cfg, index)?;
    let initial = mean_training_error(&net, &data.dataset)?;
    let mut snapshots = Vec::with_capacity(cfg.training.checkpoint_iterations.len());
    train(
        &mut net,
        &data.dataset,
        &cfg.training.train_config(seed),
        |it, n| {
            snapshots.push((it, n.clone()));
        },
    )?;
    Ok(ReplicateOutcome {
        record: ReplicateRecord {
            index,
            seed,
            initial_training_error: initial,
            final_training_error: mean_training_error(&net, &data.dataset)?,
        },
        snapshots,
        final_net: net,
    })
}

struct Writer {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Writer {
    fn put(
        &mut self,
        rel: String,
        bytes: &[u8],
        kind: ArtifactKind,
        rep: Option<usize>,
        it: Option<u64>,
    ) -> Result<()> {
        let path = self.root.join(&rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(Artifact {
            kind,
            path: rel,
            replicate: rep,
            iteration: it,
        });
        Ok(())
    }
}

fn prepare_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    if entries.next().is_some() {
        return Err(Error::Config(format!(
            "output directory {} is not empty",
            dir.display()
        )));
    }
    Ok(())
}

/// Trains every replicate and writes all checkpoint artifacts, the
/// per-checkpoint randomness reports and finally the manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());

    cfg.validate()?;
    let data = prepare_data(cfg)?;
    let strong = StrongRegionSpec::new(cfg.analysis.strong_half_width)?;
    let out_dir = &cfg.experiment.output_dir;
    prepare_output_dir(out_dir)?;

    // Replicates share nothing mutable; each thread owns its network and RNGs.
    let outcomes: Vec<ReplicateOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.experiment.replicate_count)
            .map(|i| {
                let data = &data;
                scope.spawn(move || run_replicate(cfg, data, i))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("replicate thread panicked"))
            .collect::<Result<_>>()
    })?;

    let mut w = Writer {
        root: out_dir.clone(),
        artifacts: Vec::new(),
    };
    w.put(
        "dataset.pgm".into(),
        &save_pgm(&data.image),
        ArtifactKind::DatasetImage,
        None,
        None,
    )?;
    w.put(
        "mask.pgm".into(),
        &save_pgm(&data.mask.to_gray()),
        ArtifactKind::MaskImage,
        None,
        None,
    )?;

    let size = data.image.size();
    let checkpoints = cfg.training.checkpoint_iterations.clone();
    // raw samples indexed [checkpoint][replicate]
    let mut raw: Vec<Vec<Grid>> = vec![Vec::new(); checkpoints.len()];
    let mut diagnostics: Vec<String> = vec![String::new(); checkpoints.len()];

    for out in &outcomes {
        let r = out.record.index;
        for (c, (it, net)) in out.snapshots.iter().enumerate() {
            let stem = format!("replicate-{r}/iter-{it:09}");
            let grid = sample_raw(net, size)?;
            let img = GrayImage::from_clamped(size, grid.values().iter().copied())?;
            w.put(
                format!("{stem}.function.pgm"),
                &save_pgm(&img),
                ArtifactKind::FunctionImage,
                Some(r),
                Some(*it),
            )?;
            w.put(
                format!("{stem}.function.txt"),
                grid.to_text().as_bytes(),
                ArtifactKind::FunctionRaw,
                Some(r),
                Some(*it),
            )?;
            let first = net.truncated(1)?;
            w.put(
                format!("{stem}.layer1.net"),
                network_to_text(&first).as_bytes(),
                ArtifactKind::FirstLayerWeights,
                Some(r),
                Some(*it),
            )?;
            let lines = first_layer_lines(net)?;
            let diagram = render_hyperplane_diagram(&lines, cfg.diagram.size, &cfg.diagram.style)?;
            w.put(
                format!("{stem}.diagram.pgm"),
                &save_pgm(&diagram),
                ArtifactKind::Diagram,
                Some(r),
                Some(*it),
            )?;

            let error = mean_training_error(net, &data.dataset)?;
            let crossings = crossings_in_region(&lines, &data.mask, size)?;
            let covered = data
                .dataset
                .generalized
                .iter()
                .filter(|o| lines.iter().any(|h| in_strong_region(h, o.input, &strong)))
                .count();
            let d = &mut diagnostics[c];
            writeln!(d, "replicate.{r}.training_error = {error:.16e}").unwrap();
            writeln!(d, "replicate.{r}.zero_lines = {}", lines.len()).unwrap();
            writeln!(
                d,
                "replicate.{r}.crossings_training = {}",
                crossings.in_training
            )
            .unwrap();
            writeln!(
                d,
                "replicate.{r}.crossings_generalized = {}",
                crossings.in_generalized
            )
            .unwrap();
            writeln!(
                d,
                "replicate.{r}.strong_generalized_fraction = {:.16e}",
                covered as f64 / data.dataset.generalized.len() as f64
            )
            .unwrap();
            raw[c].push(grid);
        }
        w.put(
            format!("replicate-{r}/final.net"),
            network_to_text(&out.final_net).as_bytes(),
            ArtifactKind::FinalNetwork,
            Some(r),
            None,
        )?;
    }

    for (c, &it) in checkpoints.iter().enumerate() {
        let stem = format!("report-iter-{it:09}");
        let mut text = format!("iteration = {it}\n");
        match generalization_variance(&raw[c], &data.mask) {
            Ok(report) => {
                text.push_str(&report.to_text());
                let max = report.variance.values().iter().copied().fold(0.0, f64::max);
                let scale = if max > 0.0 { max } else { 1.0 };
                let vis = GrayImage::from_clamped(
                    size,
                    report.variance.values().iter().map(|v| v / scale - 0.5),
                )?;
                w.put(
                    format!("{stem}.variance.pgm"),
                    &save_pgm(&vis),
                    ArtifactKind::VarianceImage,
                    None,
                    Some(it),
                )?;
                w.put(
                    format!("{stem}.variance.txt"),
                    report.variance.to_text().as_bytes(),
                    ArtifactKind::VarianceRaw,
                    None,
                    Some(it),
                )?;
            }
            Err(_) => {
                writeln!(text, "status = insufficient_replicates").unwrap();
                writeln!(text, "replicates = {}", raw[c].len()).unwrap();
            }
        }
        writeln!(text, "strong_half_width = {:.16e}", strong.half_width()).unwrap();
        text.push_str(&diagnostics[c]);
        w.put(
            format!("{stem}.txt"),
            text.as_bytes(),
            ArtifactKind::RandomnessReport,
            None,
            Some(it),
        )?;
    }

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generator: GENERATOR_NAME.into(),
        started_unix,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        checkpoints,
        replicates: outcomes.into_iter().map(|o| o.record).collect(),
        artifacts: w.artifacts,
        config: cfg.clone(),
    };
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_toml()).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Writes only the dataset and mask images into the configured output directory.
pub fn generate_dataset_files(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let data = prepare_data(cfg)?;
    let dir = &cfg.experiment.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, img) in [
        ("dataset.pgm", data.image.clone()),
        ("mask.pgm", data.mask.to_gray()),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, save_pgm(&img)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
