//! Pairwise-interacting Gibbs model of a persistence diagram.
//!
//! The unnormalised density of a pattern `x = {x_1, ..., x_n}` is
//!
//! ```text
//! prod_i s(x_i) * prod_{i<j} h(x_i, x_j),    h(x, y) = exp(-theta_l)  when  r_{l-1} <= |x - y| < r_l
//! ```
//!
//! with `s` the Dirichlet tile-area intensity and `h = 1` beyond the last
//! threshold. Everything is evaluated in log space and only ever as a ratio,
//! so the normalising constant never appears.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DirichletTessellation, Point, Window};
use crate::homology::PersistenceDiagram;

/// Strictly increasing interaction radii `r_1 < ... < r_k` (with `r_0 = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct InteractionThresholds(Vec<f64>);

impl TryFrom<Vec<f64>> for InteractionThresholds {
    type Error = Error;

    fn try_from(r: Vec<f64>) -> Result<Self> {
        Self::new(r)
    }
}

impl From<InteractionThresholds> for Vec<f64> {
    fn from(t: InteractionThresholds) -> Self {
        t.0
    }
}

impl InteractionThresholds {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidThresholds(
                "need at least one threshold".into(),
            ));
        }
        if !(r[0] > 0.0) || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidThresholds(
                "thresholds must be finite and positive".into(),
            ));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidThresholds(format!(
                "{r:?} is not strictly increasing"
            )));
        }
        Ok(Self(r))
    }

    /// `{0.1, 0.2, 0.3}`.
    pub fn reference() -> Self {
        Self(vec![0.1, 0.2, 0.3])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.0
    }

    pub fn max_radius(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Bin `l` (0-based) with `r_{l-1} <= d < r_l`, or `None` beyond `r_k`.
    #[inline]
    pub fn bin(&self, d: f64) -> Option<usize> {
        self.0.iter().position(|&r| d < r)
    }
}

/// Counts of `others` falling in each distance bin around `x`.
pub fn interaction_covariates(
    x: &Point,
    others: &[Point],
    thresholds: &InteractionThresholds,
) -> Vec<u32> {
    let mut counts = vec![0u32; thresholds.k()];
    for y in others {
        if let Some(l) = thresholds.bin(x.dist(y)) {
            counts[l] += 1;
        }
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct PcpiModel {
    thresholds: InteractionThresholds,
    theta: Vec<f64>,
    intensity: DirichletTessellation,
    lambda_w: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    thresholds: InteractionThresholds,
    theta: Vec<f64>,
    lambda_w: f64,
    window: Window,
    tessellation: DirichletTessellation,
}

impl TryFrom<ModelRecord> for PcpiModel {
    type Error = Error;

    fn try_from(r: ModelRecord) -> Result<Self> {
        if r.window != *r.tessellation.window() {
            return Err(Error::InvalidModel(
                "window disagrees with tessellation".into(),
            ));
        }
        PcpiModel::new(r.thresholds, r.theta, r.tessellation, r.lambda_w)
    }
}

impl From<PcpiModel> for ModelRecord {
    fn from(m: PcpiModel) -> Self {
        ModelRecord {
            window: *m.intensity.window(),
            thresholds: m.thresholds,
            theta: m.theta,
            lambda_w: m.lambda_w,
            tessellation: m.intensity,
        }
    }
}

impl PcpiModel {
    pub fn new(
        thresholds: InteractionThresholds,
        theta: Vec<f64>,
        intensity: DirichletTessellation,
        lambda_w: f64,
    ) -> Result<Self> {
        if theta.len() != thresholds.k() {
            return Err(Error::InvalidModel(format!(
                "{} coefficients for {} thresholds",
                theta.len(),
                thresholds.k()
            )));
        }
        if theta.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "interaction coefficients must be finite and >= 0, got {theta:?}"
            )));
        }
        if !(lambda_w > 0.0) || !lambda_w.is_finite() {
            return Err(Error::InvalidModel(format!(
                "lambda_w must be positive, got {lambda_w}"
            )));
        }
        Ok(Self {
            thresholds,
            theta,
            intensity,
            lambda_w,
        })
    }

    pub fn thresholds(&self) -> &InteractionThresholds {
        &self.thresholds
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn intensity(&self) -> &DirichletTessellation {
        &self.intensity
    }

    pub fn window(&self) -> &Window {
        self.intensity.window()
    }

    pub fn lambda_w(&self) -> f64 {
        self.lambda_w
    }

    pub fn with_lambda_w(mut self, lambda_w: f64) -> Result<Self> {
        if !(lambda_w > 0.0) || !lambda_w.is_finite() {
            return Err(Error::InvalidModel(format!(
                "lambda_w must be positive, got {lambda_w}"
            )));
        }
        self.lambda_w = lambda_w;
        Ok(self)
    }

    /// `ln s(x)`.
    pub fn log_s(&self, x: &Point) -> Result<f64> {
        self.intensity.intensity_at(x).map(f64::ln)
    }

    /// `ln h(x, y) = -theta_l` for the bin of `|x - y|`, zero beyond `r_k`.
    #[inline]
    pub fn log_pcpi(&self, x: &Point, y: &Point) -> f64 {
        match self.thresholds.bin(x.dist(y)) {
            Some(l) => -self.theta[l],
            None => 0.0,
        }
    }

    pub fn pcpi(&self, x: &Point, y: &Point) -> f64 {
        self.log_pcpi(x, y).exp()
    }

    /// `sum_{j != skip} ln h(x, points[j])`.
    pub fn log_interaction_with(&self, x: &Point, points: &[Point], skip: Option<usize>) -> f64 {
        points
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != skip)
            .map(|(_, y)| self.log_pcpi(x, y))
            .sum()
    }

    /// `U(x) = sum_i ln s(x_i) + sum_{i<j} ln h(x_i, x_j)`.
    pub fn log_potential_of(&self, points: &[Point]) -> Result<f64> {
        let mut u = 0.0;
        for (i, p) in points.iter().enumerate() {
            u += self.log_s(p)?;
            for q in &points[i + 1..] {
                u += self.log_pcpi(p, q);
            }
        }
        Ok(u)
    }

    pub fn log_potential(&self, d: &PersistenceDiagram) -> Result<f64> {
        self.log_potential_of(&d.points)
    }

    /// `ln L(u, x) = ln s(u) - theta . sum_i H(u, x_i)` where one copy of `u`
    /// is excluded from `x` when present.
    pub fn log_conditional_intensity(&self, u: &Point, d: &PersistenceDiagram) -> Result<f64> {
        let skip = d.points.iter().position(|p| p == u);
        Ok(self.log_s(u)? + self.log_interaction_with(u, &d.points, skip))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_tessellation;

    fn symmetric_model(theta: Vec<f64>) -> PcpiModel {
        let g = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)].map(Point::from);
        let t = build_tessellation(&g, Window::unit()).unwrap();
        PcpiModel::new(InteractionThresholds::reference(), theta, t, 1.0).unwrap()
    }

    #[test]
    fn covariates() {
        let r = InteractionThresholds::reference();
        let x = Point::new(0.5, 0.5);
        assert_eq!(interaction_covariates(&x, &[], &r), vec![0, 0, 0]);
        assert_eq!(
            interaction_covariates(&x, &[Point::new(0.55, 0.5)], &r),
            vec![1, 0, 0]
        );
        assert_eq!(
            interaction_covariates(&x, &[Point::new(0.5, 0.0)], &r),
            vec![0, 0, 0]
        );
        let others = [
            Point::new(0.5, 0.65),
            Point::new(0.5, 0.75),
            Point::new(0.52, 0.5),
        ];
        assert_eq!(interaction_covariates(&x, &others, &r), vec![1, 1, 1]);
    }

    #[test]
    fn pcpi_values() {
        let m = symmetric_model(vec![0.0; 3]);
        assert_eq!(m.pcpi(&Point::new(0.1, 0.1), &Point::new(0.11, 0.1)), 1.0);

        let m = symmetric_model(vec![0.3153, 0.3166, 0.3340]);
        let v = m.pcpi(&Point::new(0.1, 0.1), &Point::new(0.15, 0.1));
        assert!((v - (-0.3153f64).exp()).abs() < 1e-15);
        assert!((v - 0.72956).abs() < 1e-5);
        // Exactly r_1 falls in the second bin.
        let v = m.pcpi(&Point::new(0.0, 0.5), &Point::new(0.1, 0.5));
        assert_eq!(v, (-0.3166f64).exp());
        assert_eq!(m.pcpi(&Point::new(0.0, 0.5), &Point::new(0.5, 0.5)), 1.0);
    }

    #[test]
    fn potential_examples() {
        let m = symmetric_model(vec![0.5, 0.0, 0.0]);
        let empty = PersistenceDiagram::default();
        assert_eq!(m.log_potential(&empty).unwrap(), 0.0);
        let one = PersistenceDiagram::new(vec![Point::new(0.3, 0.3)], 1).unwrap();
        assert!((m.log_potential(&one).unwrap() - 0.25f64.ln()).abs() < 1e-12);
        let two =
            PersistenceDiagram::new(vec![Point::new(0.3, 0.3), Point::new(0.35, 0.3)], 1).unwrap();
        let expected = 2.0 * 0.25f64.ln() - 0.5;
        assert!((m.log_potential(&two).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn conditional_intensity_examples() {
        let m = symmetric_model(vec![0.5, 0.0, 0.0]);
        let u = Point::new(0.3, 0.3);
        let empty = PersistenceDiagram::default();
        assert!((m.log_conditional_intensity(&u, &empty).unwrap() - 0.25f64.ln()).abs() < 1e-12);
        let d = PersistenceDiagram::new(vec![Point::new(0.35, 0.3)], 1).unwrap();
        let v = m.log_conditional_intensity(&u, &d).unwrap();
        assert!((v - (0.25f64.ln() - 0.5)).abs() < 1e-12);
        let d = PersistenceDiagram::new(vec![u], 1).unwrap();
        assert!((m.log_conditional_intensity(&u, &d).unwrap() - 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn out_of_window_is_reported() {
        let m = symmetric_model(vec![0.1; 3]);
        let d = PersistenceDiagram::new(vec![Point::new(1.5, 0.3)], 1).unwrap();
        assert!(matches!(m.log_potential(&d), Err(Error::OutOfWindow(_))));
    }

    #[test]
    fn validation() {
        assert!(InteractionThresholds::new(vec![]).is_err());
        assert!(InteractionThresholds::new(vec![0.0, 0.1]).is_err());
        assert!(InteractionThresholds::new(vec![0.2, 0.1]).is_err());
        assert!(InteractionThresholds::new(vec![0.1, 0.1]).is_err());
        let t = symmetric_model(vec![0.0; 3]).intensity().clone();
        let r = InteractionThresholds::reference();
        assert!(PcpiModel::new(r.clone(), vec![0.1, -0.1, 0.0], t.clone(), 1.0).is_err());
        assert!(PcpiModel::new(r.clone(), vec![0.1, 0.1], t.clone(), 1.0).is_err());
        assert!(PcpiModel::new(r, vec![0.1; 3], t, 0.0).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = symmetric_model(vec![0.2, 0.1, 0.05]);
        let s = serde_json::to_string(&m).unwrap();
        for key in ["thresholds", "theta", "lambda_w", "tessellation", "window"] {
            assert!(s.contains(key), "{key}");
        }
        let back: PcpiModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
