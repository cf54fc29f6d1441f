use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fnn_interference::dataset::save_pgm;
use fnn_interference::experiment::{
    compare_runs, generate_dataset_files, run_experiment, ExperimentConfig,
};
use fnn_interference::geometry::first_layer_lines;
use fnn_interference::imaging::{render_hyperplane_diagram, DiagramStyle};
use fnn_interference::network::network_from_text;
use fnn_interference::{Error, Result};

#[derive(Parser)]
#[command(
    version,
    about = "Replicate MLP experiments on image-defined 2-D regression sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train all replicates of a config and write every artifact.
    Run { config: PathBuf },
    /// Compare the generalized-region variance of two finished runs (A / B).
    Compare {
        manifest_a: PathBuf,
        manifest_b: PathBuf,
    },
    /// Re-render a zero-line diagram from a saved weight dump.
    RenderWeights {
        weights: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        size: usize,
    },
    /// Write the dataset and mask images of a config without training.
    GenDataset { config: PathBuf },
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let manifest = run_experiment(&cfg)?;
            println!(
                "wrote {} artifacts to {} in {:.1}s",
                manifest.artifacts.len() + 1,
                cfg.experiment.output_dir.display(),
                manifest.elapsed_seconds
            );
        }
        Command::Compare {
            manifest_a,
            manifest_b,
        } => {
            print!("{}", compare_runs(&manifest_a, &manifest_b)?.to_text());
        }
        Command::RenderWeights { weights, out, size } => {
            let text = std::fs::read_to_string(&weights).map_err(|e| Error::Io {
                path: weights,
                source: e,
            })?;
            let net = network_from_text(&text)?;
            let img = render_hyperplane_diagram(
                &first_layer_lines(&net)?,
                size,
                &DiagramStyle::default(),
            )?;
            std::fs::write(&out, save_pgm(&img)).map_err(|e| Error::Io {
                path: out,
                source: e,
            })?;
        }
        Command::GenDataset { config } => {
            for path in generate_dataset_files(&ExperimentConfig::load(&config)?)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
