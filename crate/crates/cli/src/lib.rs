//! The `pipp` command line: generate clouds, compute diagrams, fit, sample,
//! infer and plot, one step per subcommand or all at once with `run-all`.

pub mod commands;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use pipp_core::SamplerVariant;

pub use commands::{
    cmd_fit, cmd_generate, cmd_infer, cmd_pd, cmd_plot, cmd_run_all, cmd_sample, load_config,
    FitOutput, RunAllOutputs,
};

#[derive(Debug, Parser)]
#[command(
    name = "pipp",
    version,
    about = "Point-process models of persistence diagrams"
)]
pub struct Cli {
    /// Experiment configuration (JSON). Defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or directory for `run-all`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sampler used by `sample`.
    #[arg(long, global = true, default_value = "rjmcmc")]
    pub variant: SamplerVariant,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a noisy polar-curve point cloud.
    Generate,
    /// Vietoris-Rips persistence diagram of a cloud, in (birth, persistence).
    Pd {
        #[arg(long)]
        cloud: PathBuf,
        /// Homology dimension, 0 or 1.
        #[arg(long)]
        dim: Option<u8>,
    },
    /// Maximum pseudolikelihood fit of the interaction coefficients.
    Fit {
        #[arg(long)]
        pd: PathBuf,
    },
    /// Draw diagrams from a fitted model.
    Sample {
        #[arg(long)]
        pd: PathBuf,
        #[arg(long)]
        fit: PathBuf,
    },
    /// Order-statistic significance tests.
    Infer {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        pd: PathBuf,
    },
    /// Render a diagram (CSV) or sampled diagrams (NDJSON) as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Iterations to draw side by side when plotting samples.
        #[arg(long, value_delimiter = ',', default_values_t = [100, 500])]
        iterations: Vec<usize>,
    },
    /// The whole pipeline for every sampler variant.
    RunAll,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = load_config(cli.config.as_deref(), cli.seed)?;
    let out = |default: &str| cli.out.clone().unwrap_or_else(|| PathBuf::from(default));
    match cli.command {
        Command::Generate => cmd_generate(&config, &out("cloud.csv")),
        Command::Pd { cloud, dim } => cmd_pd(
            &cloud,
            dim.unwrap_or(config.homology_dimension),
            &out("pd.csv"),
        ),
        Command::Fit { pd } => {
            let fit = cmd_fit(&pd, &config, &out("fit.json"))?;
            print!("{}", fit.table_text());
            Ok(())
        }
        Command::Sample { pd, fit } => {
            cmd_sample(&pd, &fit, &config, cli.variant, &out("samples.ndjson"))
        }
        Command::Infer { samples, pd } => {
            let report = cmd_infer(&samples, &pd, &config, &out("report.csv"))?;
            print!("{}", report.to_pretty());
            Ok(())
        }
        Command::Plot { input, iterations } => cmd_plot(&input, &iterations, &out("plot.svg")),
        Command::RunAll => {
            let outputs = cmd_run_all(&config, &out("run"))?;
            for (variant, report) in &outputs.reports {
                println!(
                    "[{variant}] significant ranks: {:?}",
                    report.significant_ranks()
                );
            }
            Ok(())
        }
    }
}
