//! Maximum pseudolikelihood via the Berman-Turner device.
//!
//! Data and dummy points together form the quadrature points `u_j`, weighted
//! by their Dirichlet tile areas `w_j`. With responses `y_j = 1 / w_j` at data
//! points and `0` at dummies, the log-pseudolikelihood becomes
//!
//! ```text
//! sum_j (y_j ln L_j - L_j) w_j,    ln L_j = ln s(u_j) + theta . z_j,    z_j = -sum_i H(u_j, x_i)
//! ```
//!
//! which is a weighted Poisson log-likelihood with log link and offset
//! `ln s(u_j)`, maximised here by IRLS (Newton on a concave objective).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::geometry::{build_tessellation, DirichletTessellation, Point, Window};
use crate::homology::{curve_diagram, PersistenceDiagram, PolarCurveSpec};
use crate::mixture::GaussianMixture;
use crate::model::{interaction_covariates, InteractionThresholds, PcpiModel};
use crate::rng::{derive_seed, label, seeded};

const DUPLICATE_NUDGE: f64 = 1e-9;
const Z_975: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DummyPointSpec {
    pub count: usize,
    pub mixture: GaussianMixture,
    pub seed: u64,
}

impl DummyPointSpec {
    /// 20 draws from the reference three-cluster mixture.
    pub fn reference(seed: u64) -> Self {
        Self {
            count: 20,
            mixture: GaussianMixture::reference(),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme {
    /// Data points first, then dummies.
    pub u: Vec<Point>,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    /// Row `j` is `-H(u_j, data \ {u_j})` summed over the data.
    pub covariates: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub is_data: Vec<bool>,
}

impl QuadratureScheme {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn k(&self) -> usize {
        self.covariates.first().map_or(0, Vec::len)
    }

    pub fn n_data(&self) -> usize {
        self.is_data.iter().filter(|&&d| d).count()
    }

    #[inline]
    fn linear_predictor(&self, theta: &[f64], j: usize) -> f64 {
        self.offset[j]
            + self.covariates[j]
                .iter()
                .zip(theta)
                .map(|(z, t)| z * t)
                .sum::<f64>()
    }
}

/// Push `p` along x until it differs from every point in `taken`.
fn distinct_from(mut p: Point, taken: &[Point], window: &Window) -> Point {
    let step = if p.x + DUPLICATE_NUDGE < window.x_max {
        DUPLICATE_NUDGE
    } else {
        -DUPLICATE_NUDGE
    };
    while taken.contains(&p) {
        p.x += step;
    }
    p
}

pub fn build_quadrature(
    diagram: &PersistenceDiagram,
    dummy: &DummyPointSpec,
    window: &Window,
    thresholds: &InteractionThresholds,
) -> Result<(QuadratureScheme, DirichletTessellation)> {
    if diagram.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    if let Some(p) = diagram.points.iter().find(|p| !window.contains_strictly(p)) {
        return Err(Error::OutOfWindow(*p));
    }

    let mut u: Vec<Point> = Vec::with_capacity(diagram.len() + dummy.count);
    for p in &diagram.points {
        let p = distinct_from(*p, &u, window);
        u.push(p);
    }
    let n_data = u.len();
    let mut rng = seeded(dummy.seed);
    for _ in 0..dummy.count {
        let p = dummy.mixture.sample_in(window, &mut rng)?;
        let p = distinct_from(p, &u, window);
        u.push(p);
    }

    let tess = build_tessellation(&u, *window)?;
    let data = &u[..n_data];
    let m = u.len();
    let mut w = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    let mut covariates = Vec::with_capacity(m);
    let mut offset = Vec::with_capacity(m);
    let mut is_data = Vec::with_capacity(m);
    for (j, p) in u.iter().enumerate() {
        let area = tess.areas()[j];
        let counts = if j < n_data {
            let others: Vec<Point> = data
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, q)| *q)
                .collect();
            interaction_covariates(p, &others, thresholds)
        } else {
            interaction_covariates(p, data, thresholds)
        };
        w.push(area);
        y.push(if j < n_data { 1.0 / area } else { 0.0 });
        covariates.push(counts.into_iter().map(|c| -(c as f64)).collect());
        offset.push(area.ln());
        is_data.push(j < n_data);
    }

    Ok((
        QuadratureScheme {
            u,
            w,
            y,
            covariates,
            offset,
            is_data,
        },
        tess,
    ))
}

/// `sum_j (y_j ln L_j - L_j) w_j`.
pub fn log_pseudolikelihood(theta: &[f64], q: &QuadratureScheme) -> f64 {
    (0..q.len())
        .map(|j| {
            let eta = q.linear_predictor(theta, j);
            (q.y[j] * eta - eta.exp()) * q.w[j]
        })
        .sum()
}

/// Gradient `sum_j w_j (y_j - L_j) z_j`.
pub fn log_pseudolikelihood_gradient(theta: &[f64], q: &QuadratureScheme) -> Vec<f64> {
    let mut g = vec![0.0; q.k()];
    for j in 0..q.len() {
        let resid = q.w[j] * (q.y[j] - q.linear_predictor(theta, j).exp());
        for (gl, z) in g.iter_mut().zip(&q.covariates[j]) {
            *gl += resid * z;
        }
    }
    g
}

/// Hessian `-sum_j w_j L_j z_j z_j^T`; negative semidefinite everywhere.
pub fn log_pseudolikelihood_hessian(theta: &[f64], q: &QuadratureScheme) -> Vec<Vec<f64>> {
    let info = fisher_information(theta, q);
    (0..q.k())
        .map(|a| (0..q.k()).map(|b| -info[(a, b)]).collect())
        .collect()
}

fn fisher_information(theta: &[f64], q: &QuadratureScheme) -> DMatrix<f64> {
    let k = q.k();
    let mut info = DMatrix::<f64>::zeros(k, k);
    for j in 0..q.len() {
        let wl = q.w[j] * q.linear_predictor(theta, j).exp();
        let z = &q.covariates[j];
        for a in 0..k {
            if z[a] == 0.0 {
                continue;
            }
            for b in 0..k {
                info[(a, b)] += wl * z[a] * z[b];
            }
        }
    }
    info
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta_hat: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub std_errors: Vec<f64>,
    pub ci_95: Vec<(f64, f64)>,
    pub p_values: Vec<f64>,
    pub log_pl: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Two-sided Wald p-value for `H0: theta = 0`.
pub fn wald_p_value(estimate: f64, se: f64) -> f64 {
    erfc((estimate / se).abs() / std::f64::consts::SQRT_2)
}

/// IRLS for the weighted Poisson regression with offset. Stops once
/// `max |delta theta| < tol`; a non-converged run still returns its best
/// iterate with `converged = false`.
pub fn fit_mple(q: &QuadratureScheme, max_iter: usize, tol: f64) -> Result<FitResult> {
    let k = q.k();
    if k == 0 || q.is_empty() {
        return Err(Error::InvalidSpec(
            "quadrature scheme has no covariates".into(),
        ));
    }
    if (0..k).any(|l| q.covariates.iter().all(|row| row[l] == 0.0)) {
        return Err(Error::Singular);
    }

    let mut theta = vec![0.0; k];
    let mut current = log_pseudolikelihood(&theta, q);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let info = fisher_information(&theta, q);
        let grad = DVector::from_vec(log_pseudolikelihood_gradient(&theta, q));
        let step = info.cholesky().ok_or(Error::Singular)?.solve(&grad);

        // Newton step with halving; the objective is concave so a short
        // enough step always improves it.
        let mut scale = 1.0;
        let mut candidate: Vec<f64>;
        let mut value;
        loop {
            candidate = theta
                .iter()
                .zip(step.iter())
                .map(|(t, s)| t + scale * s)
                .collect();
            value = log_pseudolikelihood(&candidate, q);
            if value >= current - 1e-12 * current.abs().max(1.0) || scale < 1e-10 {
                break;
            }
            scale *= 0.5;
        }
        let delta = theta
            .iter()
            .zip(&candidate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        theta = candidate;
        current = value;
        if !delta.is_finite() || !current.is_finite() {
            break;
        }
        if delta < tol {
            converged = true;
            break;
        }
    }

    let info = fisher_information(&theta, q);
    let cov = info.try_inverse().ok_or(Error::Singular)?;
    let cov = (&cov + cov.transpose()) * 0.5;
    if cov.iter().any(|c| !c.is_finite()) || theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::Singular);
    }
    let std_errors: Vec<f64> = (0..k).map(|l| cov[(l, l)].max(0.0).sqrt()).collect();
    let ci_95 = theta
        .iter()
        .zip(&std_errors)
        .map(|(t, se)| (t - Z_975 * se, t + Z_975 * se))
        .collect();
    let p_values = theta
        .iter()
        .zip(&std_errors)
        .map(|(t, se)| wald_p_value(*t, *se))
        .collect();
    Ok(FitResult {
        theta_hat: theta,
        covariance: (0..k)
            .map(|a| (0..k).map(|b| cov[(a, b)]).collect())
            .collect(),
        std_errors,
        ci_95,
        p_values,
        log_pl: current,
        converged,
        iterations,
    })
}

/// A fitted model together with what is needed to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpleFit {
    pub thresholds: InteractionThresholds,
    pub result: FitResult,
    pub tessellation: DirichletTessellation,
    /// Cardinality of the fitted diagram.
    pub n_data: usize,
}

impl MpleFit {
    /// Gibbs model with the estimated coefficients. Negative estimates
    /// (attraction) are not representable and are truncated at zero.
    pub fn to_model(&self, lambda_w: Option<f64>) -> Result<PcpiModel> {
        let theta = self.result.theta_hat.iter().map(|t| t.max(0.0)).collect();
        PcpiModel::new(
            self.thresholds.clone(),
            theta,
            self.tessellation.clone(),
            lambda_w.unwrap_or(self.n_data.max(1) as f64),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrlsSettings {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IrlsSettings {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-8,
        }
    }
}

pub fn fit_diagram(
    diagram: &PersistenceDiagram,
    dummy: &DummyPointSpec,
    window: &Window,
    thresholds: &InteractionThresholds,
    irls: IrlsSettings,
) -> Result<MpleFit> {
    let (q, tessellation) = build_quadrature(diagram, dummy, window, thresholds)?;
    let result = fit_mple(&q, irls.max_iter, irls.tol)?;
    Ok(MpleFit {
        thresholds: thresholds.clone(),
        result,
        tessellation,
        n_data: diagram.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub replication: usize,
    pub theta_hat: Option<Vec<f64>>,
    pub p_values: Option<Vec<f64>>,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub replications: Vec<ReplicationOutcome>,
    pub mean: Vec<f64>,
    pub lower_2_5: Vec<f64>,
    pub upper_97_5: Vec<f64>,
}

impl RobustnessReport {
    pub fn successful(&self) -> impl Iterator<Item = &ReplicationOutcome> {
        self.replications.iter().filter(|r| r.theta_hat.is_some())
    }
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Repeat sample -> H1 diagram -> fit over independent clouds. Failed
/// replications are recorded, not fatal.
#[allow(clippy::too_many_arguments)]
pub fn robustness_study(
    curve: &PolarCurveSpec,
    replications: usize,
    thresholds: &InteractionThresholds,
    dummy: &DummyPointSpec,
    window: &Window,
    irls: IrlsSettings,
    seed: u64,
) -> Result<RobustnessReport> {
    if replications < 2 {
        return Err(Error::InvalidSpec(
            "robustness study needs at least 2 replications".into(),
        ));
    }
    let outcomes: Vec<ReplicationOutcome> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let cloud_seed = derive_seed(seed, label::REPLICATION, r as u64);
            let dummy = DummyPointSpec {
                seed: derive_seed(seed, label::DUMMY, r as u64),
                ..dummy.clone()
            };
            let fitted = curve_diagram(curve, cloud_seed, 1)
                .and_then(|d| fit_diagram(&d, &dummy, window, thresholds, irls));
            match fitted {
                Ok(f) => ReplicationOutcome {
                    replication: r,
                    theta_hat: Some(f.result.theta_hat),
                    p_values: Some(f.result.p_values),
                    converged: f.result.converged,
                    error: None,
                },
                Err(e) => ReplicationOutcome {
                    replication: r,
                    theta_hat: None,
                    p_values: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let k = thresholds.k();
    let mut mean = vec![f64::NAN; k];
    let mut lower = vec![f64::NAN; k];
    let mut upper = vec![f64::NAN; k];
    for l in 0..k {
        let mut v: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.theta_hat.as_ref().map(|t| t[l]))
            .collect();
        if v.is_empty() {
            continue;
        }
        v.sort_by(f64::total_cmp);
        mean[l] = v.iter().sum::<f64>() / v.len() as f64;
        lower[l] = quantile_sorted(&v, 0.025);
        upper[l] = quantile_sorted(&v, 0.975);
    }
    Ok(RobustnessReport {
        replications: outcomes,
        mean,
        lower_2_5: lower,
        upper_97_5: upper,
    })
}
