//! Dirichlet (Voronoi) tessellation of a rectangular window.
//!
//! Each tile is computed independently by clipping the window rectangle with
//! the bisector half-planes against the other generators. The tile areas act
//! both as the piecewise-constant spatial intensity `s` of the model and as the
//! quadrature weights of the pseudolikelihood fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned observation window inside the wedge `{(b, p) : b, p >= 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WindowRecord")]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Deserialize)]
struct WindowRecord {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl TryFrom<WindowRecord> for Window {
    type Error = Error;

    fn try_from(r: WindowRecord) -> Result<Self> {
        Window::new(r.x_min, r.x_max, r.y_min, r.y_max)
    }
}

impl Default for Window {
    fn default() -> Self {
        Self::unit()
    }
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidWindow("non-finite bound".into()));
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidWindow(format!(
                "empty window [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        if x_min < 0.0 || y_min < 0.0 {
            return Err(Error::InvalidWindow(
                "window must lie in the wedge b, p >= 0".into(),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// `[0, 1] x [0, 1]`.
    pub const fn unit() -> Self {
        Self {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Open containment (strict interior).
    pub fn contains_strictly(&self, p: &Point) -> bool {
        p.x > self.x_min && p.x < self.x_max && p.y > self.y_min && p.y < self.y_max
    }

    pub fn corners(&self) -> Vec<Point> {
        vec![
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        ]
    }

    /// Map `(u, v)` in the unit square onto the window.
    pub fn lerp(&self, u: f64, v: f64) -> Point {
        Point::new(
            self.x_min + u * self.width(),
            self.y_min + v * self.height(),
        )
    }
}

/// Voronoi partition of a window together with the per-tile areas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TessellationRecord")]
pub struct DirichletTessellation {
    window: Window,
    generators: Vec<Point>,
    areas: Vec<f64>,
}

#[derive(Deserialize)]
struct TessellationRecord {
    window: Window,
    generators: Vec<Point>,
    #[allow(dead_code)]
    #[serde(default)]
    areas: Vec<f64>,
}

impl TryFrom<TessellationRecord> for DirichletTessellation {
    type Error = Error;

    // Areas are always recomputed so a hand-edited file cannot break the
    // conservation invariant.
    fn try_from(r: TessellationRecord) -> Result<Self> {
        build_tessellation(&r.generators, r.window)
    }
}

impl DirichletTessellation {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Index of the nearest generator; ties go to the smallest index.
    pub fn tile_index(&self, x: &Point) -> Result<usize> {
        if !self.window.contains(x) {
            return Err(Error::OutOfWindow(*x));
        }
        Ok(self.nearest(x))
    }

    /// Piecewise-constant intensity `s(x)`: the area of the tile containing `x`.
    pub fn intensity_at(&self, x: &Point) -> Result<f64> {
        self.tile_index(x).map(|i| self.areas[i])
    }

    pub(crate) fn nearest(&self, x: &Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, g) in self.generators.iter().enumerate() {
            let d = g.dist2(x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Vertices of tile `i`, counter-clockwise.
    pub fn cell_polygon(&self, i: usize) -> Vec<Point> {
        voronoi_cell(&self.generators, i, &self.window)
    }
}

pub fn build_tessellation(generators: &[Point], window: Window) -> Result<DirichletTessellation> {
    if generators.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = generators.iter().find(|p| !window.contains_strictly(p)) {
        return Err(Error::OutOfWindow(*p));
    }
    let mut sorted: Vec<&Point> = generators.iter().collect();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateGenerator(*w[0]));
    }

    let areas = (0..generators.len())
        .map(|i| polygon_area(&voronoi_cell(generators, i, &window)))
        .collect();
    Ok(DirichletTessellation {
        window,
        generators: generators.to_vec(),
        areas,
    })
}

/// Clip the window by the bisector half-planes of generator `i`.
///
/// Neighbours are visited nearest first; once a neighbour is farther than
/// twice the current cell radius its bisector cannot cut the cell, and neither
/// can any later one.
fn voronoi_cell(generators: &[Point], i: usize, window: &Window) -> Vec<Point> {
    let p = generators[i];
    let mut others: Vec<(f64, usize)> = generators
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, g)| (g.dist2(&p), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut poly = window.corners();
    for (d2, j) in others {
        let radius2 = poly.iter().map(|v| v.dist2(&p)).fold(0.0, f64::max);
        if d2 > 4.0 * radius2 {
            break;
        }
        let q = generators[j];
        // |x - p|^2 <= |x - q|^2  <=>  n . x <= c
        let n = Point::new(q.x - p.x, q.y - p.y);
        let c = 0.5 * (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y);
        poly = clip_half_plane(&poly, n, c);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Sutherland-Hodgman against the single half-plane `n . x <= c`.
fn clip_half_plane(poly: &[Point], n: Point, c: f64) -> Vec<Point> {
    let side = |v: &Point| n.x * v.x + n.y * v.y - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}

/// Shoelace formula.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice.abs()
}
