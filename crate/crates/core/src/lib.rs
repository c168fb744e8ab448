//! Pairwise-interacting point-process models for persistence diagrams.
//!
//! Diagrams are stored in tilted coordinates `(birth, persistence)`. A model
//! combines a spatial term `s`, estimated from a Dirichlet tessellation of the
//! observation window, with a piecewise-constant pairwise interaction. The
//! crate covers:
//!
//! * [`geometry`]: windows and Dirichlet tessellations,
//! * [`homology`]: point clouds, Vietoris-Rips persistence in dimensions 0 and 1,
//! * [`model`]: the Gibbs density and its conditional intensity,
//! * [`fit`]: maximum pseudolikelihood by the Berman-Turner device,
//! * [`sampler`]: reversible-jump MCMC over diagrams,
//! * [`inference`]: order-statistic significance tests,
//! * [`config`] and [`io`]: pipeline configuration and file formats.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod homology;
pub mod inference;
pub mod io;
pub mod mixture;
pub mod model;
pub mod rng;
pub mod sampler;

pub use config::{ChainConfig, ExperimentConfig};
pub use error::{Error, Result};
pub use fit::{
    build_quadrature, fit_diagram, fit_mple, log_pseudolikelihood, log_pseudolikelihood_gradient,
    robustness_study, DummyPointSpec, FitResult, IrlsSettings, MpleFit, QuadratureScheme,
    RobustnessReport,
};
pub use geometry::{build_tessellation, DirichletTessellation, Point, Window};
pub use homology::{
    curve_diagram, sample_polar_curve, tilt, vietoris_rips_diagram, PersistenceDiagram, PointCloud,
    PolarCurveSpec, RipsDiagram,
};
pub use inference::{one_sided_ci, order_statistics, sequential_test, InferenceReport, RankResult};
pub use mixture::{GaussianMixture, MixtureComponent};
pub use model::{InteractionThresholds, PcpiModel};
pub use sampler::{
    run_add_remove, run_chains, run_mwg, run_rjmcmc, run_variant, ChainSettings, MoveProbabilities,
    SampleSet, SamplerVariant,
};
