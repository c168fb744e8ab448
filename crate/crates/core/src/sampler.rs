//! Reversible-jump MCMC over persistence diagrams.
//!
//! Each iteration draws one move type:
//!
//! * **add** a point drawn uniformly on the window,
//! * **remove** a uniformly chosen point,
//! * **relocate**: one Metropolis-within-Gibbs sweep, proposing every point
//!   in turn from an independence proposal `q`.
//!
//! Acceptance ratios (log space, accept when `ln u < ln R`):
//!
//! ```text
//! add:       R = exp(sum_i ln h(d_i, d*)) s(d*) lambda(W) / (|D| + 1)
//! remove:    R = |D| / (exp(sum_{j != i} ln h(d_j, d_i)) s(d_i) lambda(W))
//! relocate:  R = s(d*) g(D*) q(d_i) / (s(d_i) g(D) q(d*))
//! ```
//!
//! where `g` is the interaction part of the density; only the terms touching
//! the moved point survive in its ratio. When both `p_a` and `p_r` are
//! positive the add/remove ratios are multiplied by `p_r / p_a` and
//! `p_a / p_r` so the chain stays reversible for unequal move probabilities;
//! with `p_a = p_r` the factor is one.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::homology::PersistenceDiagram;
use crate::mixture::GaussianMixture;
use crate::model::PcpiModel;
use crate::rng::{derive_seed, label, seeded};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MoveRecord")]
pub struct MoveProbabilities {
    pub add: f64,
    pub remove: f64,
    pub relocate: f64,
}

#[derive(Deserialize)]
struct MoveRecord {
    add: f64,
    remove: f64,
    relocate: f64,
}

impl TryFrom<MoveRecord> for MoveProbabilities {
    type Error = Error;

    fn try_from(r: MoveRecord) -> Result<Self> {
        MoveProbabilities::new(r.add, r.remove, r.relocate)
    }
}

impl Default for MoveProbabilities {
    /// `(0.35, 0.35, 0.3)`.
    fn default() -> Self {
        Self {
            add: 0.35,
            remove: 0.35,
            relocate: 0.3,
        }
    }
}

impl MoveProbabilities {
    pub fn new(add: f64, remove: f64, relocate: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(ok(add) && ok(remove) && ok(relocate)) {
            return Err(Error::InvalidConfig(
                "move probabilities must lie in [0, 1]".into(),
            ));
        }
        if (add + remove + relocate - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "move probabilities sum to {}, not 1",
                add + remove + relocate
            )));
        }
        Ok(Self {
            add,
            remove,
            relocate,
        })
    }

    pub fn relocate_only() -> Self {
        Self {
            add: 0.0,
            remove: 0.0,
            relocate: 1.0,
        }
    }

    pub fn add_remove(p_add: f64) -> Result<Self> {
        if !(p_add > 0.0 && p_add < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "p_a = {p_add} must lie in (0, 1)"
            )));
        }
        Self::new(p_add, 1.0 - p_add, 0.0)
    }

    /// `ln(p_r / p_a)` applied to births (and its negation to deaths).
    fn log_birth_correction(&self) -> f64 {
        if self.add > 0.0 && self.remove > 0.0 {
            (self.remove / self.add).ln()
        } else {
            0.0
        }
    }
}

/// Where births are drawn; its density is treated as uniform.
pub trait BirthProposal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point;
}

impl BirthProposal for Window {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.lerp(rng.random::<f64>(), rng.random::<f64>())
    }
}

/// Independence proposal for relocations; the density may be unnormalised.
pub trait RelocationProposal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point>;
    fn log_density(&self, p: &Point) -> f64;
}

/// A mixture truncated to a window.
#[derive(Clone, Debug)]
pub struct WindowedMixture<'a> {
    pub mixture: &'a GaussianMixture,
    pub window: Window,
}

impl RelocationProposal for WindowedMixture<'_> {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        self.mixture.sample_in(&self.window, rng)
    }

    fn log_density(&self, p: &Point) -> f64 {
        self.mixture.log_density(p)
    }
}

/// Shared pieces of the add and remove ratios, summed in a fixed order so the
/// two ratios are exact negatives of each other in log space.
fn birth_log_terms(
    model: &PcpiModel,
    others: &[Point],
    skip: Option<usize>,
    p: &Point,
) -> Result<f64> {
    Ok(model.log_interaction_with(p, others, skip) + model.log_s(p)? + model.lambda_w().ln())
}

/// `ln R` for adding `d_star` to `points`.
pub fn log_ratio_add(points: &[Point], d_star: &Point, model: &PcpiModel) -> Result<f64> {
    let terms = birth_log_terms(model, points, None, d_star)?;
    Ok(terms - ((points.len() + 1) as f64).ln())
}

/// `ln R` for removing `points[i]`.
pub fn log_ratio_remove(points: &[Point], i: usize, model: &PcpiModel) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let p = points
        .get(i)
        .ok_or_else(|| Error::InvalidSpec(format!("index {i} out of range")))?;
    let terms = birth_log_terms(model, points, Some(i), p)?;
    Ok((points.len() as f64).ln() - terms)
}

/// `ln R` for relocating `points[i]` to `d_star`.
pub fn log_ratio_relocate<Q: RelocationProposal>(
    points: &[Point],
    i: usize,
    d_star: &Point,
    model: &PcpiModel,
    q: &Q,
) -> Result<f64> {
    let old = points
        .get(i)
        .ok_or_else(|| Error::InvalidSpec(format!("index {i} out of range")))?;
    let ds = model.log_s(d_star)? - model.log_s(old)?;
    let dg = model.log_interaction_with(d_star, points, Some(i))
        - model.log_interaction_with(old, points, Some(i));
    let dq = q.log_density(old) - q.log_density(d_star);
    Ok(ds + dg + dq)
}

fn clamp_probability(log_r: f64) -> f64 {
    log_r.min(0.0).exp()
}

pub fn acc_add(d: &PersistenceDiagram, d_star: &Point, model: &PcpiModel) -> Result<f64> {
    log_ratio_add(&d.points, d_star, model).map(clamp_probability)
}

pub fn acc_remove(d: &PersistenceDiagram, i: usize, model: &PcpiModel) -> Result<f64> {
    log_ratio_remove(&d.points, i, model).map(clamp_probability)
}

pub fn acc_relocate<Q: RelocationProposal>(
    d: &PersistenceDiagram,
    i: usize,
    d_star: &Point,
    model: &PcpiModel,
    q: &Q,
) -> Result<f64> {
    if d_star == d.points.get(i).unwrap_or(d_star) {
        // Identical state; skip the density evaluations.
        model.log_s(d_star)?;
        return Ok(1.0);
    }
    log_ratio_relocate(&d.points, i, d_star, model, q).map(clamp_probability)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Births that would exceed this cardinality are rejected outright.
    #[serde(default)]
    pub max_points: Option<usize>,
}

impl ChainSettings {
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self {
            iterations,
            burn_in: 0,
            thin: 1,
            seed,
            max_points: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::InvalidConfig(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub points: Vec<Point>,
    pub log_potential: f64,
    pub iteration: usize,
}

impl ChainState {
    pub fn new(initial: &PersistenceDiagram, model: &PcpiModel) -> Result<Self> {
        Ok(Self {
            points: initial.points.clone(),
            log_potential: model.log_potential(initial)?,
            iteration: 0,
        })
    }

    pub fn recompute(&self, model: &PcpiModel) -> Result<f64> {
        model.log_potential_of(&self.points)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl MoveStats {
    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += u64::from(accepted);
    }

    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDiagnostics {
    pub add: MoveStats,
    pub remove: MoveStats,
    /// Counted per single-point proposal inside a sweep.
    pub relocate: MoveStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordedDiagram {
    pub chain: usize,
    pub iteration: usize,
    pub diagram: PersistenceDiagram,
    /// Cumulative counts for this chain up to `iteration`.
    pub diagnostics: MoveDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub diagrams: Vec<RecordedDiagram>,
    pub diagnostics: MoveDiagnostics,
    /// Cardinality after every iteration, recorded or not.
    pub cardinality: Vec<usize>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn iter_diagrams(&self) -> impl Iterator<Item = &PersistenceDiagram> {
        self.diagrams.iter().map(|r| &r.diagram)
    }

    /// Concatenate chains in order.
    pub fn merge(sets: Vec<SampleSet>) -> SampleSet {
        let mut out = SampleSet {
            diagrams: Vec::new(),
            diagnostics: MoveDiagnostics::default(),
            cardinality: Vec::new(),
        };
        for s in sets {
            out.diagrams.extend(s.diagrams);
            out.cardinality.extend(s.cardinality);
            for (acc, add) in [
                (&mut out.diagnostics.add, s.diagnostics.add),
                (&mut out.diagnostics.remove, s.diagnostics.remove),
                (&mut out.diagnostics.relocate, s.diagnostics.relocate),
            ] {
                acc.proposed += add.proposed;
                acc.accepted += add.accepted;
            }
        }
        out
    }
}

/// The chain driver shared by every sampler variant. Called with the step
/// callback after each iteration, mainly for diagnostics in tests.
pub fn run_chain_with<B, Q, F>(
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    moves: MoveProbabilities,
    birth: &B,
    relocation: Option<&Q>,
    settings: &ChainSettings,
    mut on_step: F,
) -> Result<SampleSet>
where
    B: BirthProposal,
    Q: RelocationProposal,
    F: FnMut(&ChainState),
{
    settings.validate()?;
    if moves.relocate > 0.0 && relocation.is_none() {
        return Err(Error::InvalidConfig(
            "relocation moves need a proposal".into(),
        ));
    }
    let mut rng = seeded(settings.seed);
    let mut state = ChainState::new(initial, model)?;
    let mut diagnostics = MoveDiagnostics::default();
    let mut diagrams = Vec::new();
    let mut cardinality = Vec::with_capacity(settings.iterations);
    let birth_correction = moves.log_birth_correction();
    let dim = initial.homology_dimension;

    for l in 1..=settings.iterations {
        let gamma: f64 = rng.random();
        if gamma < moves.add {
            let d_star = birth.sample(&mut rng);
            let full = settings.max_points.is_some_and(|m| state.points.len() >= m);
            let accepted = if full {
                false
            } else {
                let log_r = log_ratio_add(&state.points, &d_star, model)? + birth_correction;
                let accept = rng.random::<f64>().ln() < log_r;
                if accept {
                    state.log_potential += model.log_s(&d_star)?
                        + model.log_interaction_with(&d_star, &state.points, None);
                    state.points.push(d_star);
                }
                accept
            };
            diagnostics.add.record(accepted);
        } else if gamma < moves.add + moves.remove {
            // An empty pattern has nothing to remove; the chain stays put.
            let accepted = if state.points.is_empty() {
                false
            } else {
                let i = rng.random_range(0..state.points.len());
                let log_r = log_ratio_remove(&state.points, i, model)? - birth_correction;
                let accept = rng.random::<f64>().ln() < log_r;
                if accept {
                    let p = state.points[i];
                    state.log_potential -=
                        model.log_s(&p)? + model.log_interaction_with(&p, &state.points, Some(i));
                    state.points.remove(i);
                }
                accept
            };
            diagnostics.remove.record(accepted);
        } else {
            let q = relocation.expect("checked above");
            for i in 0..state.points.len() {
                let d_star = q.sample(&mut rng)?;
                let log_r = log_ratio_relocate(&state.points, i, &d_star, model, q)?;
                let accept = rng.random::<f64>().ln() < log_r;
                if accept {
                    let old = state.points[i];
                    state.log_potential += model.log_s(&d_star)? - model.log_s(&old)?
                        + model.log_interaction_with(&d_star, &state.points, Some(i))
                        - model.log_interaction_with(&old, &state.points, Some(i));
                    state.points[i] = d_star;
                }
                diagnostics.relocate.record(accept);
            }
        }
        state.iteration = l;

        #[cfg(debug_assertions)]
        {
            let full = state.recompute(model)?;
            debug_assert!(
                (full - state.log_potential).abs() <= 1e-9 * full.abs().max(1.0),
                "log-potential cache drifted: {} vs {}",
                state.log_potential,
                full
            );
        }

        cardinality.push(state.points.len());
        if l > settings.burn_in && (l - settings.burn_in).is_multiple_of(settings.thin) {
            diagrams.push(RecordedDiagram {
                chain: 0,
                iteration: l,
                diagram: PersistenceDiagram {
                    points: state.points.clone(),
                    homology_dimension: dim,
                },
                diagnostics,
            });
        }
        on_step(&state);
    }

    Ok(SampleSet {
        diagrams,
        diagnostics,
        cardinality,
    })
}

/// Add, remove and relocate with births uniform on the model window and
/// relocations drawn from `q` truncated to it.
pub fn run_rjmcmc(
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    moves: MoveProbabilities,
    q: &GaussianMixture,
    settings: &ChainSettings,
) -> Result<SampleSet> {
    let proposal = WindowedMixture {
        mixture: q,
        window: *model.window(),
    };
    run_chain_with(
        initial,
        model,
        moves,
        model.window(),
        Some(&proposal),
        settings,
        |_| {},
    )
}

/// Relocation sweeps only; the cardinality never changes.
pub fn run_mwg(
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    q: &GaussianMixture,
    settings: &ChainSettings,
) -> Result<SampleSet> {
    run_rjmcmc(
        initial,
        model,
        MoveProbabilities::relocate_only(),
        q,
        settings,
    )
}

/// Births and deaths only, with `p_r = 1 - p_a`.
pub fn run_add_remove(
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    p_add: f64,
    settings: &ChainSettings,
) -> Result<SampleSet> {
    let moves = MoveProbabilities::add_remove(p_add)?;
    run_chain_with::<_, WindowedMixture, _>(
        initial,
        model,
        moves,
        model.window(),
        None,
        settings,
        |_| {},
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerVariant {
    Rjmcmc,
    Mwg,
    #[serde(rename = "addremove")]
    AddRemove,
}

impl std::str::FromStr for SamplerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rjmcmc" => Ok(Self::Rjmcmc),
            "mwg" => Ok(Self::Mwg),
            "addremove" | "add-remove" | "add_remove" => Ok(Self::AddRemove),
            other => Err(Error::InvalidConfig(format!(
                "unknown sampler variant '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for SamplerVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rjmcmc => "rjmcmc",
            Self::Mwg => "mwg",
            Self::AddRemove => "addremove",
        })
    }
}

pub fn run_variant(
    variant: SamplerVariant,
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    moves: MoveProbabilities,
    q: &GaussianMixture,
    settings: &ChainSettings,
) -> Result<SampleSet> {
    match variant {
        SamplerVariant::Rjmcmc => run_rjmcmc(initial, model, moves, q, settings),
        SamplerVariant::Mwg => run_mwg(initial, model, q, settings),
        SamplerVariant::AddRemove => {
            // Relocation mass is handed back to births and deaths in proportion.
            let p_add = if moves.add + moves.remove > 0.0 {
                moves.add / (moves.add + moves.remove)
            } else {
                0.5
            };
            run_add_remove(initial, model, p_add, settings)
        }
    }
}

/// Independent chains in parallel; chain `c` uses seed
/// `derive_seed(settings.seed, CHAIN, c)`. Results are in chain order.
pub fn run_chains(
    variant: SamplerVariant,
    chains: usize,
    initial: &PersistenceDiagram,
    model: &PcpiModel,
    moves: MoveProbabilities,
    q: &GaussianMixture,
    settings: &ChainSettings,
) -> Result<Vec<SampleSet>> {
    if chains == 0 {
        return Err(Error::InvalidConfig("need at least one chain".into()));
    }
    (0..chains)
        .into_par_iter()
        .map(|c| {
            let s = ChainSettings {
                seed: derive_seed(settings.seed, label::CHAIN, c as u64),
                ..*settings
            };
            let mut set = run_variant(variant, initial, model, moves, q, &s)?;
            for r in &mut set.diagrams {
                r.chain = c;
            }
            Ok(set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_tessellation;
    use crate::model::InteractionThresholds;

    fn constant_model(theta: Vec<f64>, lambda_w: f64) -> PcpiModel {
        let t = build_tessellation(&[Point::new(0.5, 0.5)], Window::unit()).unwrap();
        PcpiModel::new(InteractionThresholds::reference(), theta, t, lambda_w).unwrap()
    }

    fn quarter_model(theta: Vec<f64>, lambda_w: f64) -> PcpiModel {
        let g = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)].map(Point::from);
        let t = build_tessellation(&g, Window::unit()).unwrap();
        PcpiModel::new(InteractionThresholds::reference(), theta, t, lambda_w).unwrap()
    }

    fn pd(pts: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(pts.iter().copied().map(Point::from).collect(), 1).unwrap()
    }

    #[test]
    fn move_probability_validation() {
        assert!(MoveProbabilities::new(0.35, 0.35, 0.3).is_ok());
        assert!(MoveProbabilities::new(0.5, 0.5, 0.1).is_err());
        assert!(MoveProbabilities::new(-0.1, 0.6, 0.5).is_err());
        assert!(MoveProbabilities::add_remove(1.0).is_err());
        assert_eq!(MoveProbabilities::add_remove(0.5).unwrap().remove, 0.5);
    }

    #[test]
    fn relocate_noop_is_certain() {
        let m = quarter_model(vec![0.5, 0.2, 0.1], 3.0);
        let q = GaussianMixture::reference();
        let qw = WindowedMixture {
            mixture: &q,
            window: Window::unit(),
        };
        let d = pd(&[(0.3, 0.3), (0.32, 0.3)]);
        assert_eq!(
            acc_relocate(&d, 0, &Point::new(0.3, 0.3), &m, &qw).unwrap(),
            1.0
        );
    }

    /// Uniform density over the unit window.
    struct Flat;

    impl RelocationProposal for Flat {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
            Ok(Point::new(rng.random(), rng.random()))
        }

        fn log_density(&self, _: &Point) -> f64 {
            0.0
        }
    }

    #[test]
    fn relocate_far_apart_cancels() {
        let m = constant_model(vec![0.5, 0.4, 0.3], 1.0);
        let d = pd(&[(0.1, 0.1), (0.9, 0.9)]);
        let a = acc_relocate(&d, 0, &Point::new(0.1, 0.6), &m, &Flat).unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn relocate_hand_example() {
        // Pair distance 0.05 -> 0.5 removes a factor exp(-0.5).
        let m = constant_model(vec![0.5, 0.0, 0.0], 1.0);
        let d = pd(&[(0.2, 0.2), (0.25, 0.2)]);
        let log_r = log_ratio_relocate(&d.points, 1, &Point::new(0.7, 0.2), &m, &Flat).unwrap();
        assert!((log_r - 0.5).abs() < 1e-12);
        assert_eq!(
            acc_relocate(&d, 1, &Point::new(0.7, 0.2), &m, &Flat).unwrap(),
            1.0
        );
    }

    #[test]
    fn add_examples() {
        let m = quarter_model(vec![0.5, 0.0, 0.0], 1.0);
        let empty = PersistenceDiagram::default();
        let a = acc_add(&empty, &Point::new(0.1, 0.1), &m).unwrap();
        assert!((a - 0.25).abs() < 1e-12);

        let m0 = quarter_model(vec![0.0; 3], 6.0);
        let d = pd(&[(0.1, 0.1), (0.12, 0.1)]);
        let a = acc_add(&d, &Point::new(0.11, 0.1), &m0).unwrap();
        assert!((a - 0.25 * 6.0 / 3.0).abs() < 1e-12);

        let m = quarter_model(vec![0.5, 0.0, 0.0], 2.0);
        let d = pd(&[(0.3, 0.3)]);
        let a = acc_add(&d, &Point::new(0.35, 0.3), &m).unwrap();
        let expected = (-0.5f64).exp() * 0.25;
        assert!((a - expected).abs() < 1e-12);
        assert!((a - 0.1516).abs() < 1e-4);
    }

    #[test]
    fn remove_examples() {
        let m = quarter_model(vec![0.0; 3], 1.0);
        let d = pd(&[(0.3, 0.3)]);
        assert_eq!(acc_remove(&d, 0, &m).unwrap(), 1.0);
        let log_r = log_ratio_remove(&d.points, 0, &m).unwrap();
        assert!((log_r - 4f64.ln()).abs() < 1e-12);

        let m = quarter_model(vec![0.5, 0.0, 0.0], 2.0);
        let d = pd(&[(0.3, 0.3), (0.35, 0.3)]);
        assert_eq!(acc_remove(&d, 1, &m).unwrap(), 1.0);
        let r = log_ratio_remove(&d.points, 1, &m).unwrap().exp();
        assert!((r - 2.0 / ((-0.5f64).exp() * 0.25 * 2.0)).abs() < 1e-9);

        assert!(matches!(
            acc_remove(&PersistenceDiagram::default(), 0, &m),
            Err(Error::EmptyDiagram)
        ));
    }

    #[test]
    fn add_remove_reciprocity_is_exact() {
        let m = quarter_model(vec![0.7, 0.3, 0.1], 5.0);
        let d = pd(&[(0.3, 0.3), (0.35, 0.31), (0.6, 0.2), (0.62, 0.9)]);
        let d_star = Point::new(0.4, 0.33);
        let add = log_ratio_add(&d.points, &d_star, &m).unwrap();
        let mut bigger = d.points.clone();
        bigger.push(d_star);
        let remove = log_ratio_remove(&bigger, 4, &m).unwrap();
        assert_eq!(add + remove, 0.0);
    }

    #[test]
    fn mwg_keeps_cardinality_and_matches_rjmcmc() {
        let m = quarter_model(vec![0.3, 0.2, 0.1], 4.0);
        let q = GaussianMixture::reference();
        let init = pd(&[(0.6, 0.85), (0.4, 0.6), (0.3, 0.05)]);
        let s = ChainSettings::new(200, 11);
        let a = run_mwg(&init, &m, &q, &s).unwrap();
        assert!(a.cardinality.iter().all(|&c| c == 3));
        let b = run_rjmcmc(&init, &m, MoveProbabilities::relocate_only(), &q, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
        assert_eq!(a.diagnostics.relocate.proposed, 600);
    }

    #[test]
    fn recording_respects_burn_in_and_thin() {
        let m = quarter_model(vec![0.3, 0.2, 0.1], 4.0);
        let q = GaussianMixture::reference();
        let init = pd(&[(0.5, 0.5)]);
        let s = ChainSettings {
            iterations: 100,
            burn_in: 10,
            thin: 3,
            seed: 1,
            max_points: None,
        };
        let out = run_rjmcmc(&init, &m, MoveProbabilities::default(), &q, &s).unwrap();
        let its: Vec<usize> = out.diagrams.iter().map(|r| r.iteration).collect();
        assert_eq!(its.first(), Some(&13));
        assert!(its.windows(2).all(|w| w[1] - w[0] == 3));
        assert_eq!(out.len(), 30);
        assert_eq!(out.cardinality.len(), 100);
        let d = out.diagnostics;
        for stats in [d.add, d.remove, d.relocate] {
            assert!(stats.accepted <= stats.proposed);
        }
    }

    #[test]
    fn add_remove_only_births_uniform_points() {
        let m = quarter_model(vec![0.3, 0.2, 0.1], 4.0);
        let init = pd(&[(0.6, 0.85), (0.4, 0.6)]);
        let out = run_add_remove(&init, &m, 0.5, &ChainSettings::new(500, 3)).unwrap();
        assert_eq!(out.diagnostics.relocate.proposed, 0);
        // Every point is either an initial point or a fresh birth.
        let mut births = Vec::new();
        let mut prev = init.points.clone();
        for r in &out.diagrams {
            for p in &r.diagram.points {
                if !prev.contains(p) && !init.points.contains(p) {
                    births.push(*p);
                }
            }
            prev = r.diagram.points.clone();
        }
        assert!(births.iter().all(|p| Window::unit().contains(p)));
        assert!(!births.is_empty());
    }

    #[test]
    fn invalid_settings() {
        let m = quarter_model(vec![0.3, 0.2, 0.1], 4.0);
        let q = GaussianMixture::reference();
        let init = pd(&[(0.5, 0.5)]);
        let mut s = ChainSettings::new(10, 0);
        s.burn_in = 10;
        assert!(run_rjmcmc(&init, &m, MoveProbabilities::default(), &q, &s).is_err());
        let mut s = ChainSettings::new(10, 0);
        s.thin = 0;
        assert!(run_rjmcmc(&init, &m, MoveProbabilities::default(), &q, &s).is_err());
    }

    #[test]
    fn seed_determinism() {
        let m = quarter_model(vec![0.3, 0.2, 0.1], 4.0);
        let q = GaussianMixture::reference();
        let init = pd(&[(0.6, 0.85), (0.4, 0.6), (0.3, 0.05)]);
        let s = ChainSettings::new(300, 99);
        let a = run_rjmcmc(&init, &m, MoveProbabilities::default(), &q, &s).unwrap();
        let b = run_rjmcmc(&init, &m, MoveProbabilities::default(), &q, &s).unwrap();
        assert_eq!(a, b);
        let c = run_rjmcmc(
            &init,
            &m,
            MoveProbabilities::default(),
            &q,
            &ChainSettings::new(300, 100),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn variants_parse() {
        assert_eq!(
            "rjmcmc".parse::<SamplerVariant>().unwrap(),
            SamplerVariant::Rjmcmc
        );
        assert_eq!(
            "addremove".parse::<SamplerVariant>().unwrap(),
            SamplerVariant::AddRemove
        );
        assert!("gibbs".parse::<SamplerVariant>().is_err());
    }
}
