//! Experiment configuration for the end-to-end pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{DummyPointSpec, IrlsSettings};
use crate::geometry::Window;
use crate::homology::PolarCurveSpec;
use crate::mixture::GaussianMixture;
use crate::model::InteractionThresholds;
use crate::rng::{derive_seed, label};
use crate::sampler::{ChainSettings, MoveProbabilities};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    #[serde(default)]
    pub max_points: Option<usize>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            burn_in: 0,
            thin: 1,
            chains: 1,
            max_points: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub window: Window,
    pub curve: PolarCurveSpec,
    pub homology_dimension: u8,
    pub thresholds: InteractionThresholds,
    pub dummy_count: usize,
    pub dummy_mixture: GaussianMixture,
    pub irls: IrlsSettings,
    pub moves: MoveProbabilities,
    pub proposal: GaussianMixture,
    /// `None` uses the cardinality of the fitted diagram.
    pub lambda_w: Option<f64>,
    pub chain: ChainConfig,
    pub alpha: f64,
    pub max_rank: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            window: Window::unit(),
            curve: PolarCurveSpec::default(),
            homology_dimension: 1,
            thresholds: InteractionThresholds::reference(),
            dummy_count: 20,
            dummy_mixture: GaussianMixture::reference(),
            irls: IrlsSettings::default(),
            moves: MoveProbabilities::default(),
            proposal: GaussianMixture::reference(),
            lambda_w: None,
            chain: ChainConfig::default(),
            alpha: 0.05,
            max_rank: 5,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.curve.validate()?;
        if self.homology_dimension > 1 {
            return Err(Error::InvalidConfig(
                "homology_dimension must be 0 or 1".into(),
            ));
        }
        if self.dummy_count == 0 {
            return Err(Error::InvalidConfig("dummy_count must be positive".into()));
        }
        if let Some(l) = self.lambda_w {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "lambda_w = {l} must be positive"
                )));
            }
        }
        if self.chain.chains == 0 {
            return Err(Error::InvalidConfig("chain.chains must be >= 1".into()));
        }
        if self.chain.thin == 0 || self.chain.iterations <= self.chain.burn_in {
            return Err(Error::InvalidConfig(
                "chain needs thin >= 1 and iterations > burn_in".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        if self.max_rank == 0 {
            return Err(Error::InvalidConfig("max_rank must be >= 1".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn cloud_seed(&self) -> u64 {
        derive_seed(self.seed, label::NOISE, 0)
    }

    pub fn dummy_spec(&self) -> DummyPointSpec {
        DummyPointSpec {
            count: self.dummy_count,
            mixture: self.dummy_mixture.clone(),
            seed: derive_seed(self.seed, label::DUMMY, 0),
        }
    }

    /// Base settings; chain `c` reseeds from this via the chain stream.
    pub fn chain_settings(&self) -> ChainSettings {
        ChainSettings {
            iterations: self.chain.iterations,
            burn_in: self.chain.burn_in,
            thin: self.chain.thin,
            seed: self.seed,
            max_points: self.chain.max_points,
        }
    }
}
