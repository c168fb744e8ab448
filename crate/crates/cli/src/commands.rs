//! Subcommand implementations. Every command is a pure function of its input
//! files, the configuration and the seed.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pipp_core::io::{
    read_cloud_csv, read_diagram_csv, read_samples_ndjson, write_cardinality_csv, write_cloud_csv,
    write_diagram_csv, write_samples_ndjson,
};
use pipp_core::{
    fit_diagram, run_chains, sample_polar_curve, sequential_test, vietoris_rips_diagram,
    ExperimentConfig, InferenceReport, MpleFit, PersistenceDiagram, SampleSet, SamplerVariant,
};

use crate::svg;

pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            ExperimentConfig::from_json(&text)
                .with_context(|| format!("parsing config {}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_diagram(path: &Path, default_dim: u8) -> Result<PersistenceDiagram> {
    read_diagram_csv(open(path)?, default_dim)
        .with_context(|| format!("reading diagram {}", path.display()))
}

pub fn cmd_generate(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let cloud = sample_polar_curve(&config.curve, config.cloud_seed())?;
    write_cloud_csv(&cloud, create(out)?)?;
    Ok(())
}

/// The diagram at scale equal to the cloud diameter, so every finite class dies.
pub fn cmd_pd(cloud: &Path, dim: u8, out: &Path) -> Result<()> {
    let cloud = read_cloud_csv(open(cloud)?)
        .with_context(|| format!("reading cloud {}", cloud.display()))?;
    let scale = cloud.diameter();
    let rips = vietoris_rips_diagram(&cloud, dim, if scale > 0.0 { scale } else { 1.0 })?;
    write_diagram_csv(&rips.diagram, create(out)?)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_95: (f64, f64),
    pub p_value: f64,
}

/// Contents of `fit.json`: a coefficient table followed by everything needed
/// to rebuild the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub coefficients: Vec<CoefficientRow>,
    pub fit: MpleFit,
}

impl FitOutput {
    pub fn new(fit: MpleFit) -> Self {
        let r = &fit.result;
        let coefficients = (0..r.theta_hat.len())
            .map(|l| CoefficientRow {
                name: format!("theta_{}", l + 1),
                estimate: r.theta_hat[l],
                std_error: r.std_errors[l],
                ci_95: r.ci_95[l],
                p_value: r.p_values[l],
            })
            .collect();
        Self { coefficients, fit }
    }

    pub fn table_text(&self) -> String {
        let mut s = format!(
            "{:<8} {:>10} {:>24} {:>10}\n",
            "coef", "estimate", "95% CI", "p value"
        );
        for c in &self.coefficients {
            let ci = format!("[{:.4}, {:.4}]", c.ci_95.0, c.ci_95.1);
            let _ = writeln!(
                s,
                "{:<8} {:>10.4} {:>24} {:>10.2e}",
                c.name, c.estimate, ci, c.p_value
            );
        }
        if !self.fit.result.converged {
            s.push_str("warning: IRLS did not converge; estimates are the last iterate\n");
        }
        s
    }
}

pub fn cmd_fit(pd: &Path, config: &ExperimentConfig, out: &Path) -> Result<FitOutput> {
    let diagram = read_diagram(pd, config.homology_dimension)?;
    let fit = fit_diagram(
        &diagram,
        &config.dummy_spec(),
        &config.window,
        &config.thresholds,
        config.irls,
    )?;
    let output = FitOutput::new(fit);
    let mut w = create(out)?;
    serde_json::to_writer_pretty(&mut w, &output)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(output)
}

fn read_fit(path: &Path) -> Result<FitOutput> {
    serde_json::from_reader(open(path)?).with_context(|| format!("parsing fit {}", path.display()))
}

/// `samples.ndjson` -> `samples.trace.csv`.
pub fn trace_path(samples: &Path) -> PathBuf {
    samples.with_extension("trace.csv")
}

fn sample(
    diagram: &PersistenceDiagram,
    fit: &MpleFit,
    config: &ExperimentConfig,
    variant: SamplerVariant,
) -> Result<SampleSet> {
    let model = fit.to_model(config.lambda_w)?;
    let sets = run_chains(
        variant,
        config.chain.chains,
        diagram,
        &model,
        config.moves,
        &config.proposal,
        &config.chain_settings(),
    )?;
    Ok(SampleSet::merge(sets))
}

/// Writes the samples to `out` and the cardinality trace beside it.
pub fn cmd_sample(
    pd: &Path,
    fit: &Path,
    config: &ExperimentConfig,
    variant: SamplerVariant,
    out: &Path,
) -> Result<()> {
    let diagram = read_diagram(pd, config.homology_dimension)?;
    let fit = read_fit(fit)?;
    let samples = sample(&diagram, &fit.fit, config, variant)?;
    write_samples_ndjson(&samples, create(out)?)?;
    write_cardinality_csv(&samples, create(&trace_path(out))?)?;
    Ok(())
}

pub fn cmd_infer(
    samples: &Path,
    pd: &Path,
    config: &ExperimentConfig,
    out: &Path,
) -> Result<InferenceReport> {
    let diagram = read_diagram(pd, config.homology_dimension)?;
    let set = read_samples_ndjson(open(samples)?)
        .with_context(|| format!("reading samples {}", samples.display()))?;
    let report = sequential_test(&set, &diagram, config.alpha, config.max_rank)?;
    write_text(out, &report.to_csv())?;
    Ok(report)
}

fn is_samples_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("ndjson") | Some("jsonl")
    )
}

pub fn cmd_plot(input: &Path, iterations: &[usize], out: &Path) -> Result<()> {
    let doc = if is_samples_file(input) {
        let set = read_samples_ndjson(open(input)?)
            .with_context(|| format!("reading samples {}", input.display()))?;
        let mut panels = Vec::new();
        for &it in iterations {
            let Some(r) = set
                .diagrams
                .iter()
                .find(|r| r.chain == 0 && r.iteration == it)
            else {
                bail!("iteration {it} was not recorded in {}", input.display());
            };
            panels.push((format!("iteration {it}"), &r.diagram));
        }
        if panels.is_empty() {
            bail!("no iterations requested");
        }
        svg::render(&panels)
    } else {
        let d = read_diagram(input, 1)?;
        svg::render(&[("persistence diagram".to_string(), &d)])
    };
    write_text(out, &doc)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RunAllOutputs {
    pub files: Vec<PathBuf>,
    pub reports: Vec<(SamplerVariant, InferenceReport)>,
}

/// generate -> pd -> fit -> (sample -> infer -> plot) per variant, all under `dir`.
pub fn cmd_run_all(config: &ExperimentConfig, dir: &Path) -> Result<RunAllOutputs> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files: Vec<PathBuf> = Vec::new();
    let mut path = |name: &str| {
        let p = dir.join(name);
        files.push(p.clone());
        p
    };

    let config_path = path("config.json");
    write_text(&config_path, &format!("{}\n", config.to_json()?))?;
    let cloud = path("cloud.csv");
    cmd_generate(config, &cloud)?;
    let pd = path("pd.csv");
    cmd_pd(&cloud, config.homology_dimension, &pd)?;
    let fit = path("fit.json");
    cmd_fit(&pd, config, &fit)?;
    cmd_plot(&pd, &[], &path("pd.svg"))?;

    let mut reports = Vec::new();
    for variant in [
        SamplerVariant::Rjmcmc,
        SamplerVariant::Mwg,
        SamplerVariant::AddRemove,
    ] {
        let samples = path(&format!("samples_{variant}.ndjson"));
        cmd_sample(&pd, &fit, config, variant, &samples)?;
        let _ = path(&format!("samples_{variant}.trace.csv"));
        let report = cmd_infer(
            &samples,
            &pd,
            config,
            &path(&format!("report_{variant}.csv")),
        )?;
        write_text(&path(&format!("report_{variant}.txt")), &report.to_pretty())?;
        let wanted: Vec<usize> = [100, 500]
            .into_iter()
            .filter(|&it| {
                it > config.chain.burn_in
                    && it <= config.chain.iterations
                    && (it - config.chain.burn_in).is_multiple_of(config.chain.thin)
            })
            .collect();
        if !wanted.is_empty() {
            cmd_plot(&samples, &wanted, &path(&format!("samples_{variant}.svg")))?;
        }
        reports.push((variant, report));
    }
    Ok(RunAllOutputs { files, reports })
}
