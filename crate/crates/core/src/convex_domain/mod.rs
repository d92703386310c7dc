//! Bounded planar convex bodies as finite halfplane intersections.
//!
//! A [`HalfplaneBody`] stands in for a sup-level set of a concave function: its
//! boundary distance is `min_i (c_i - n_i·x)`, its inner parallel bodies are exact
//! offset shifts, and its maximum set is the optimal face of the Chebyshev-center LP.
//! Smooth arcs are approximated by supporting halfplanes (see [`generators`]).

mod excess;
pub mod generators;
mod lp;
mod polygon;
mod soul;

use serde::{Deserialize, Serialize};

pub use excess::{alexander_bishop_excess, angular_excess, excess_slope, AlexanderBishop, ExcessProfile};
pub use soul::{soul, MaxSet, SoulConstruction, SoulStage};

use crate::{GeomError, Point, Result, Vector};

/// Closed halfplane `{x : normal·x <= offset}` with a unit outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfplane {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfplane {
    /// Normalizes `(normal, offset)` so that the normal has unit length.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len.is_finite() && offset.is_finite()) || len == 0.0 {
            return Err(GeomError::InvalidBody(format!(
                "halfplane ({}, {}; {offset}) is not finite with a nonzero normal",
                normal.x, normal.y
            )));
        }
        Ok(Self { normal: normal / len, offset: offset / len })
    }

    pub fn slack(&self, x: &Point) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// Wire format: `{"label": ..., "halfplanes": [{"nx", "ny", "c"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyJson {
    pub label: String,
    pub halfplanes: Vec<HalfplaneJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfplaneJson {
    pub nx: f64,
    pub ny: f64,
    pub c: f64,
}

/// A bounded convex body with nonempty interior. Immutable after construction.
///
/// Offsets are stored relative to the parent body together with the total erosion
/// depth, so nested inner parallel bodies compose without accumulating rounding.
#[derive(Debug, Clone)]
pub struct HalfplaneBody {
    label: String,
    base: Vec<Halfplane>,
    depth: f64,
    vertices: Vec<Point>,
    diameter: f64,
    center: Point,
    inradius: f64,
}

/// Result of eroding a body by a disk.
#[derive(Debug, Clone)]
pub enum Erosion {
    Body(HalfplaneBody),
    /// Erosion depth equals the inradius: what remains is the maximum set.
    Degenerate(MaxSet),
    Empty,
}

impl Erosion {
    pub fn body(&self) -> Option<&HalfplaneBody> {
        match self {
            Erosion::Body(b) => Some(b),
            _ => None,
        }
    }

    pub fn into_body(self) -> Option<HalfplaneBody> {
        match self {
            Erosion::Body(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Erosion::Empty)
    }
}

impl HalfplaneBody {
    pub fn new(label: impl Into<String>, halfplanes: Vec<Halfplane>) -> Result<Self> {
        let label = label.into();
        for h in &halfplanes {
            if (h.normal.norm() - 1.0).abs() > 1e-12 || !h.offset.is_finite() {
                return Err(GeomError::InvalidBody("halfplane normals must have unit length".into()));
            }
        }
        let base = dedup_parallel(halfplanes);
        if base.len() < 3 {
            return Err(GeomError::InvalidBody("a bounded body needs at least three halfplanes".into()));
        }
        if !normals_surround_origin(&base) {
            return Err(GeomError::InvalidBody("halfplane intersection is unbounded".into()));
        }
        let cheb = lp::chebyshev_center(&base)?;
        let scale = base.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
        if cheb.radius <= 1e-12 * scale {
            return Err(GeomError::InvalidBody(format!(
                "halfplane intersection has empty interior (inradius {})",
                cheb.radius
            )));
        }
        let vertices = polygon::vertices(&base);
        if vertices.len() < 3 {
            return Err(GeomError::Internal("vertex recovery failed for a feasible body".into()));
        }
        let diameter = polygon::diameter(&vertices);
        Ok(Self { label, base, depth: 0.0, vertices, diameter, center: cheb.center, inradius: cheb.radius })
    }

    pub fn from_json(json: &BodyJson) -> Result<Self> {
        let planes = json
            .halfplanes
            .iter()
            .map(|h| Halfplane::new(Vector::new(h.nx, h.ny), h.c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.label.clone(), planes)
    }

    pub fn to_json(&self) -> BodyJson {
        BodyJson {
            label: self.label.clone(),
            halfplanes: self
                .halfplanes()
                .map(|h| HalfplaneJson { nx: h.normal.x, ny: h.normal.y, c: h.offset })
                .collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Total erosion applied relative to the root body.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn normal(&self, i: usize) -> Vector {
        self.base[i].normal
    }

    pub fn offset(&self, i: usize) -> f64 {
        self.base[i].offset - self.depth
    }

    pub fn halfplane(&self, i: usize) -> Halfplane {
        Halfplane { normal: self.base[i].normal, offset: self.offset(i) }
    }

    pub fn halfplanes(&self) -> impl Iterator<Item = Halfplane> + '_ {
        (0..self.base.len()).map(move |i| self.halfplane(i))
    }

    /// `c_i - n_i·x` for constraint `i`.
    pub fn slack(&self, i: usize, x: &Point) -> f64 {
        self.offset(i) - self.base[i].normal.dot(x)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    /// A point realizing the inradius (one vertex of the LP optimal face).
    pub fn chebyshev_center(&self) -> Point {
        self.center
    }

    /// Tolerance scale for geometric predicates on this body.
    pub fn tol(&self) -> f64 {
        1e-9 * (1.0 + self.diameter)
    }

    /// `min_i (c_i - n_i·x)`: the distance to the boundary for interior points.
    pub fn min_slack(&self, x: &Point) -> f64 {
        (0..self.base.len()).map(|i| self.slack(i, x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.min_slack(x) >= -tol
    }

    /// Signed distance to the boundary: positive inside, negated Euclidean distance
    /// to the body outside.
    pub fn boundary_distance(&self, x: &Point) -> f64 {
        let inner = self.min_slack(x);
        if inner >= 0.0 {
            return inner;
        }
        let n = self.vertices.len();
        let d = (0..n)
            .map(|k| polygon::segment_distance(x, &self.vertices[k], &self.vertices[(k + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        -d
    }

    /// The inner parallel body `{x : d(x, ∂B) >= s}`.
    pub fn inner_parallel(&self, s: f64) -> Result<Erosion> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(GeomError::domain(format!("erosion depth must be a nonnegative length, got {s}")));
        }
        if s == 0.0 {
            return Ok(Erosion::Body(self.clone()));
        }
        let tol = self.tol();
        if s > self.inradius + tol {
            return Ok(Erosion::Empty);
        }
        if s >= self.inradius - tol {
            let (_, max_set) = self.inradius_and_max_set()?;
            return Ok(Erosion::Degenerate(max_set));
        }
        let depth = self.depth + s;
        let shifted: Vec<Halfplane> =
            self.base.iter().map(|h| Halfplane { normal: h.normal, offset: h.offset - depth }).collect();
        let vertices = polygon::vertices(&shifted);
        if vertices.len() < 3 {
            return Ok(Erosion::Degenerate(self.inradius_and_max_set()?.1));
        }
        let diameter = polygon::diameter(&vertices);
        Ok(Erosion::Body(Self {
            label: self.label.clone(),
            base: self.base.clone(),
            depth,
            vertices,
            diameter,
            center: self.center,
            inradius: self.inradius - s,
        }))
    }

    /// Inradius and the maximum set of the boundary distance.
    pub fn inradius_and_max_set(&self) -> Result<(f64, MaxSet)> {
        let max_set = soul::max_set(self)?;
        Ok((self.inradius, max_set))
    }

    /// Applies `x ↦ scale·R(angle)·x + shift` to the body.
    pub fn transformed(&self, angle: f64, shift: Vector, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(GeomError::domain("scale must be positive"));
        }
        let planes = self
            .halfplanes()
            .map(|h| {
                let n = crate::geom::rotate(&h.normal, angle);
                Halfplane::new(n, scale * h.offset + n.dot(&shift))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.label.clone(), planes)
    }
}

fn dedup_parallel(mut planes: Vec<Halfplane>) -> Vec<Halfplane> {
    let mut out: Vec<Halfplane> = Vec::with_capacity(planes.len());
    planes.sort_by(|a, b| a.normal.y.atan2(a.normal.x).total_cmp(&b.normal.y.atan2(b.normal.x)));
    for h in planes {
        if let Some(k) = out.iter().position(|o| (o.normal - h.normal).norm() < 1e-12) {
            if h.offset < out[k].offset {
                out[k] = h;
            }
        } else {
            out.push(h);
        }
    }
    out
}

/// Bounded iff no angular gap between consecutive normals reaches `π`.
fn normals_surround_origin(planes: &[Halfplane]) -> bool {
    let mut angles: Vec<f64> = planes.iter().map(|h| h.normal.y.atan2(h.normal.x)).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let max_gap = (0..n)
        .map(|i| {
            let next = if i + 1 < n { angles[i + 1] } else { angles[0] + std::f64::consts::TAU };
            next - angles[i]
        })
        .fold(0.0, f64::max);
    max_gap < std::f64::consts::PI - 1e-12
}
