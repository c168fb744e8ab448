//! Point clouds, Vietoris-Rips persistence in dimensions 0 and 1, and the
//! tilted `(birth, persistence)` representation of diagrams.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::seeded;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidSpec(
                "non-finite coordinate in point cloud".into(),
            ));
        }
        Ok(Self {
            points,
            label: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d2 = d2.max(p.dist2(q));
            }
        }
        d2.sqrt()
    }
}

/// Noisy samples from the polar curve `r(phi) = a + b cos(2 phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarCurveSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    /// Standard deviation of the isotropic Gaussian noise, per coordinate.
    pub noise_sd: f64,
}

impl Default for PolarCurveSpec {
    fn default() -> Self {
        Self {
            a: 0.5,
            b: 1.0,
            n: 400,
            noise_sd: 0.1,
        }
    }
}

impl PolarCurveSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidSpec(format!("need n >= 3, got {}", self.n)));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::InvalidSpec(
                "noise_sd must be finite and >= 0".into(),
            ));
        }
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidSpec("curve parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn radius(&self, phi: f64) -> f64 {
        self.a + self.b * (2.0 * phi).cos()
    }
}

pub fn sample_polar_curve(spec: &PolarCurveSpec, seed: u64) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = seeded(seed);
    // sd = 0 is a valid normal in rand_distr and yields exact zeros.
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let points = (0..spec.n)
        .map(|_| {
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let r = spec.radius(phi);
            Point::new(
                r * phi.cos() + noise.sample(&mut rng),
                r * phi.sin() + noise.sample(&mut rng),
            )
        })
        .collect();
    PointCloud::new(points)
}

/// A multiset of tilted `(birth, persistence)` points; `x` is birth and `y`
/// is persistence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub points: Vec<Point>,
    pub homology_dimension: u8,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<Point>, homology_dimension: u8) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(p.x >= 0.0 && p.y >= 0.0)) {
            return Err(Error::NegativePersistence {
                birth: p.x,
                death: p.x + p.y,
            });
        }
        Ok(Self {
            points,
            homology_dimension,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Persistence values, largest first.
    pub fn sorted_persistences(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.points.iter().map(|p| p.y).collect();
        p.sort_by(|a, b| b.total_cmp(a));
        p
    }
}

/// `T(b, d) = (b, d - b)`.
pub fn tilt(birth: f64, death: f64) -> Result<Point> {
    if !(death >= birth) || birth < 0.0 {
        return Err(Error::NegativePersistence { birth, death });
    }
    Ok(Point::new(birth, death - birth))
}

/// Result of a Rips computation.
#[derive(Clone, Debug, PartialEq)]
pub struct RipsDiagram {
    pub diagram: PersistenceDiagram,
    /// H0 classes alive at `max_scale` (dimension 0 only).
    pub essential: usize,
    /// H1 classes born at or below `max_scale` but not yet dead there.
    pub truncated: usize,
    pub max_scale: f64,
}

/// Persistence of the Vietoris-Rips filtration where every simplex enters at
/// its diameter. Zero-persistence pairs are dropped; diagram points are sorted
/// by `(birth, persistence)`.
pub fn vietoris_rips_diagram(cloud: &PointCloud, dim: u8, max_scale: f64) -> Result<RipsDiagram> {
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    if dim > 1 {
        return Err(Error::InvalidSpec(format!(
            "homology dimension {dim} not supported"
        )));
    }
    if !(max_scale > 0.0) {
        return Err(Error::InvalidSpec("max_scale must be positive".into()));
    }
    let pts = &cloud.points;
    let n = pts.len();

    let mut edges: Vec<(f64, u32, u32)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = pts[i].dist(&pts[j]);
            if d <= max_scale {
                edges.push((d, i as u32, j as u32));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    // H0 by union-find; a merging edge is exactly a negative edge.
    let mut uf = UnionFind::new(n);
    let mut h0 = Vec::new();
    let mut positive = vec![false; edges.len()];
    for (e, &(d, i, j)) in edges.iter().enumerate() {
        if uf.union(i as usize, j as usize) {
            h0.push(d);
        } else {
            positive[e] = true;
        }
    }
    let components = n - h0.len();

    let mut out = Vec::new();
    let mut truncated = 0;
    if dim == 0 {
        for d in h0 {
            if d > 0.0 {
                out.push(tilt(0.0, d)?);
            }
        }
    } else {
        let n_positive = positive.iter().filter(|&&p| p).count();
        let pairs = reduce_triangles(pts, &edges, &positive, max_scale);
        for &(e, death) in &pairs {
            let birth = edges[e].0;
            if death > birth {
                out.push(tilt(birth, death)?);
            }
        }
        truncated = n_positive - pairs.len();
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));

    Ok(RipsDiagram {
        diagram: PersistenceDiagram {
            points: out,
            homology_dimension: dim,
        },
        essential: if dim == 0 { components } else { 0 },
        truncated,
        max_scale,
    })
}

/// Triangle in filtration order: diameter first, then lexicographic vertices.
/// Non-negative floats order the same as their bit patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Simplex2 {
    diam_bits: u64,
    vertices: [u32; 3],
}

impl Simplex2 {
    fn diameter(&self) -> f64 {
        f64::from_bits(self.diam_bits)
    }
}

/// Persistent cohomology in dimension one with clearing: positive edges are
/// reduced in reverse filtration order against their coboundaries, which are
/// enumerated on the fly. Returns `(edge index, death value)` for every H1
/// pair; positive edges left unpaired are classes alive at `max_scale`.
fn reduce_triangles(
    pts: &[Point],
    edges: &[(f64, u32, u32)],
    positive: &[bool],
    max_scale: f64,
) -> Vec<(usize, f64)> {
    let n = pts.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pts[i].dist(&pts[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let coface = |i: u32, j: u32, k: u32, d_ij: f64| -> Option<Simplex2> {
        let (a, b) = (
            dist[i as usize * n + k as usize],
            dist[j as usize * n + k as usize],
        );
        if a > max_scale || b > max_scale {
            return None;
        }
        let mut v = [i, j, k];
        v.sort_unstable();
        Some(Simplex2 {
            diam_bits: d_ij.max(a).max(b).to_bits(),
            vertices: v,
        })
    };
    let coboundary = |e: u32| -> Vec<Simplex2> {
        let (d, i, j) = edges[e as usize];
        let mut out: Vec<Simplex2> = (0..n as u32)
            .filter(|&k| k != i && k != j)
            .filter_map(|k| coface(i, j, k, d))
            .collect();
        out.sort_unstable();
        out
    };

    // Pivot triangle -> edge whose reduced cocycle owns it, plus the edges
    // making up that cocycle when it is more than the edge itself.
    let mut owner: HashMap<Simplex2, u32> = HashMap::new();
    let mut combination: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut pairs = Vec::new();

    for e in (0..edges.len()).rev() {
        if !positive[e] {
            continue;
        }
        let e = e as u32;
        let (d, i, j) = edges[e as usize];
        let first = (0..n as u32)
            .filter(|&k| k != i && k != j)
            .filter_map(|k| coface(i, j, k, d))
            .min();
        let Some(first) = first else { continue };
        if let std::collections::hash_map::Entry::Vacant(slot) = owner.entry(first) {
            slot.insert(e);
            pairs.push((e as usize, first.diameter()));
            continue;
        }

        let mut col = coboundary(e);
        let mut parts = vec![e];
        while let Some(&pivot) = col.first() {
            let Some(&other) = owner.get(&pivot) else {
                break;
            };
            let other_parts = combination
                .get(&other)
                .cloned()
                .unwrap_or_else(|| vec![other]);
            for &f in &other_parts {
                col = symmetric_difference(&col, &coboundary(f));
            }
            parts = symmetric_difference_u32(&parts, &other_parts);
        }
        if let Some(&pivot) = col.first() {
            owner.insert(pivot, e);
            pairs.push((e as usize, pivot.diameter()));
            if parts.len() > 1 {
                combination.insert(e, parts);
            }
        }
    }
    pairs
}

fn symmetric_difference_u32(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    symmetric_difference(&a, &b)
}

fn symmetric_difference<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Sample a cloud from a curve spec, compute its diagram with the default
/// scale (the cloud diameter).
pub fn curve_diagram(spec: &PolarCurveSpec, seed: u64, dim: u8) -> Result<PersistenceDiagram> {
    let cloud = sample_polar_curve(spec, seed)?;
    let scale = cloud.diameter().max(f64::MIN_POSITIVE);
    Ok(vietoris_rips_diagram(&cloud, dim, scale)?.diagram)
}
