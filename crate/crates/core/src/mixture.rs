//! Isotropic Gaussian mixtures on the plane, truncated to a window.
//!
//! Used both to scatter dummy quadrature points and as the independence
//! proposal for point relocation.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};

const MAX_REJECTIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    /// Unnormalised mixing weight.
    pub weight: f64,
    pub mean: Point,
    /// Per-coordinate variance.
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MixtureComponent>", into = "Vec<MixtureComponent>")]
pub struct GaussianMixture {
    components: Vec<MixtureComponent>,
    total_weight: f64,
}

impl TryFrom<Vec<MixtureComponent>> for GaussianMixture {
    type Error = Error;

    fn try_from(c: Vec<MixtureComponent>) -> Result<Self> {
        GaussianMixture::new(c)
    }
}

impl From<GaussianMixture> for Vec<MixtureComponent> {
    fn from(m: GaussianMixture) -> Self {
        m.components
    }
}

impl GaussianMixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSpec("mixture has no components".into()));
        }
        for c in &components {
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "mixture weight {} must be positive",
                    c.weight
                )));
            }
            if !(c.variance > 0.0 && c.variance.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "mixture variance {} must be positive",
                    c.variance
                )));
            }
        }
        let total_weight = components.iter().map(|c| c.weight).sum();
        Ok(Self {
            components,
            total_weight,
        })
    }

    /// Three clusters at `(0.6, 0.85)`, `(0.4, 0.6)`, `(0.3, 0.01)` with
    /// weights `1:1:6` and variance `0.001`.
    pub fn reference() -> Self {
        let c = |w, x, y| MixtureComponent {
            weight: w,
            mean: Point::new(x, y),
            variance: 0.001,
        };
        Self::new(vec![c(1.0, 0.6, 0.85), c(1.0, 0.4, 0.6), c(6.0, 0.3, 0.01)])
            .expect("reference mixture is valid")
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut u = rng.random::<f64>() * self.total_weight;
        let mut chosen = &self.components[self.components.len() - 1];
        for c in &self.components {
            if u < c.weight {
                chosen = c;
                break;
            }
            u -= c.weight;
        }
        let sd = chosen.variance.sqrt();
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        Point::new(chosen.mean.x + sd * zx, chosen.mean.y + sd * zy)
    }

    /// Rejection sampling from the mixture restricted to the window interior.
    pub fn sample_in<R: Rng + ?Sized>(&self, window: &Window, rng: &mut R) -> Result<Point> {
        for _ in 0..MAX_REJECTIONS {
            let p = self.sample(rng);
            if window.contains_strictly(&p) {
                return Ok(p);
            }
        }
        Err(Error::InvalidSpec(
            "mixture has negligible mass inside the window".into(),
        ))
    }

    /// Log density of the untruncated mixture. The truncation constant is
    /// omitted; it cancels in every ratio the sampler forms.
    pub fn log_density(&self, p: &Point) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .map(|c| {
                let w = c.weight / self.total_weight;
                w.ln()
                    - (std::f64::consts::TAU * c.variance).ln()
                    - c.mean.dist2(p) / (2.0 * c.variance)
            })
            .collect();
        log_sum_exp(&terms)
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn density_integrates_to_one() {
        let m = GaussianMixture::new(vec![
            MixtureComponent {
                weight: 1.0,
                mean: Point::new(0.0, 0.0),
                variance: 0.5,
            },
            MixtureComponent {
                weight: 3.0,
                mean: Point::new(1.0, -1.0),
                variance: 0.2,
            },
        ])
        .unwrap();
        let h = 0.02;
        let mut total = 0.0;
        let mut x = -6.0;
        while x < 7.0 {
            let mut y = -7.0;
            while y < 6.0 {
                total += m.log_density(&Point::new(x, y)).exp() * h * h;
                y += h;
            }
            x += h;
        }
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }

    #[test]
    fn truncated_samples_stay_inside() {
        let m = GaussianMixture::reference();
        let w = Window::unit();
        let mut rng = seeded(1);
        let pts: Vec<Point> = (0..2000)
            .map(|_| m.sample_in(&w, &mut rng).unwrap())
            .collect();
        assert!(pts.iter().all(|p| w.contains_strictly(p)));
        // 1:1:6 before truncation; the low cluster keeps Phi(0.01 / sd) ~ 0.624
        // of its draws, so it makes up 0.468 / 0.718 ~ 0.652 of accepted ones.
        let low = pts.iter().filter(|p| p.y < 0.3).count() as f64 / 2000.0;
        assert!((low - 0.652).abs() < 0.04, "{low}");
    }

    #[test]
    fn rejects_bad_components() {
        let bad = MixtureComponent {
            weight: 0.0,
            mean: Point::new(0.0, 0.0),
            variance: 1.0,
        };
        assert!(GaussianMixture::new(vec![bad]).is_err());
        assert!(GaussianMixture::new(vec![]).is_err());
        let bad = MixtureComponent {
            weight: 1.0,
            variance: -1.0,
            ..bad
        };
        assert!(GaussianMixture::new(vec![bad]).is_err());
    }

    #[test]
    fn no_mass_in_window_is_an_error() {
        let far = GaussianMixture::new(vec![MixtureComponent {
            weight: 1.0,
            mean: Point::new(50.0, 50.0),
            variance: 1e-4,
        }])
        .unwrap();
        assert!(far.sample_in(&Window::unit(), &mut seeded(0)).is_err());
    }
}
