//! Flat cones `[0, ∞) × (ℝ/βℤ)` of total angle `0 < β <= 2π`.
//!
//! Away from the apex a cone is locally Euclidean, so every computation develops the
//! relevant sector into the plane. Two points whose angular gap `δ` reaches `π` are
//! joined only through the apex.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{from_angle, wrap_pi};
use crate::{GeomError, Point, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeJson", into = "ConeJson")]
pub struct ConeSurface {
    beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ConeJson {
    beta: f64,
}

impl TryFrom<ConeJson> for ConeSurface {
    type Error = GeomError;
    fn try_from(j: ConeJson) -> Result<Self> {
        ConeSurface::new(j.beta)
    }
}

impl From<ConeSurface> for ConeJson {
    fn from(c: ConeSurface) -> Self {
        ConeJson { beta: c.beta }
    }
}

/// Polar coordinates on a cone; `theta` is meaningful modulo `β` and ignored at the apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
}

impl ConePoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(GeomError::domain(format!("invalid cone point ({r}, {theta})")));
        }
        Ok(Self { r, theta })
    }

    pub fn apex() -> Self {
        Self { r: 0.0, theta: 0.0 }
    }

    pub fn is_apex(&self) -> bool {
        self.r == 0.0
    }
}

/// A minimizing geodesic. `ThroughApex` is the broken radial path used when `δ >= π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geodesic {
    /// Developed segment from `(r_from, 0)` to `r_to·e^{iΔ}`, rotated by `theta_from`.
    Straight { from: ConePoint, to: ConePoint, delta: f64 },
    ThroughApex { from: ConePoint, to: ConePoint },
}

impl Geodesic {
    pub fn length(&self) -> f64 {
        match *self {
            Geodesic::Straight { from, to, delta } => chord(from.r, to.r, delta),
            Geodesic::ThroughApex { from, to } => from.r + to.r,
        }
    }

    pub fn passes_through_apex(&self) -> bool {
        matches!(self, Geodesic::ThroughApex { .. })
    }

    /// The point at fraction `t ∈ [0, 1]` of the length.
    pub fn point_at(&self, t: f64) -> ConePoint {
        let t = t.clamp(0.0, 1.0);
        match *self {
            Geodesic::Straight { from, to, delta } => {
                let a = Point::new(from.r, 0.0);
                let b = from_angle(delta) * to.r;
                let x = a + (b - a) * t;
                let r = x.norm();
                if r == 0.0 {
                    return ConePoint::apex();
                }
                ConePoint { r, theta: from.theta + x.y.atan2(x.x) }
            }
            Geodesic::ThroughApex { from, to } => {
                let s = t * (from.r + to.r);
                if s <= from.r {
                    ConePoint { r: from.r - s, theta: from.theta }
                } else {
                    ConePoint { r: s - from.r, theta: to.theta }
                }
            }
        }
    }

    /// Initial direction at the start point, measured counterclockwise from the outward
    /// radial direction there. `None` when the geodesic starts at the apex.
    pub fn initial_direction(&self) -> Option<f64> {
        match *self {
            _ if self.start().is_apex() => None,
            Geodesic::Straight { from, to, delta } => {
                let d = from_angle(delta) * to.r - Point::new(from.r, 0.0);
                Some(d.y.atan2(d.x))
            }
            Geodesic::ThroughApex { .. } => Some(PI),
        }
    }

    fn start(&self) -> ConePoint {
        match *self {
            Geodesic::Straight { from, .. } | Geodesic::ThroughApex { from, .. } => from,
        }
    }
}

/// Law of cosines in the form `(r1 − r2)² + 4·r1·r2·sin²(δ/2)`, which has no cancellation.
fn chord(r1: f64, r2: f64, delta: f64) -> f64 {
    let h = (0.5 * delta).sin();
    ((r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * h * h).sqrt()
}

impl ConeSurface {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= TAU) {
            return Err(GeomError::domain(format!(
                "cone angle must lie in (0, 2π] for non-negative curvature, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn plane() -> Self {
        Self { beta: TAU }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Representative of `to − from` modulo `β` in `[−β/2, β/2]`.
    pub fn signed_gap(&self, from: f64, to: f64) -> f64 {
        let half = 0.5 * self.beta;
        let w = (to - from + half).rem_euclid(self.beta) - half;
        // Keep the representative in range after rounding.
        w.clamp(-half, half)
    }

    /// `δ = min_k |a − b + kβ| ∈ [0, β/2]`.
    pub fn angle_gap(&self, a: f64, b: f64) -> f64 {
        // Ordered arguments make the gap, and hence the metric, exactly symmetric.
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.signed_gap(lo, hi).abs()
    }

    pub fn point(&self, r: f64, theta: f64) -> Result<ConePoint> {
        let p = ConePoint::new(r, theta)?;
        Ok(ConePoint { r: p.r, theta: p.theta.rem_euclid(self.beta) })
    }

    pub fn distance(&self, p: &ConePoint, q: &ConePoint) -> f64 {
        let delta = self.angle_gap(p.theta, q.theta);
        if delta >= PI {
            p.r + q.r
        } else {
            chord(p.r, q.r, delta)
        }
    }

    pub fn geodesic(&self, p: &ConePoint, q: &ConePoint) -> Geodesic {
        let delta = self.signed_gap(p.theta, q.theta);
        if delta.abs() >= PI {
            Geodesic::ThroughApex { from: *p, to: *q }
        } else {
            Geodesic::Straight { from: *p, to: *q, delta }
        }
    }

    /// Busemann function of the ray `t ↦ (t, ray_angle)`: `−r·cos(min(δ, π))`.
    pub fn busemann(&self, ray_angle: f64, x: &ConePoint) -> f64 {
        -x.r * self.angle_gap(ray_angle, x.theta).min(PI).cos()
    }

    /// `d(x, γ(t)) − t`, the finite-`t` approximant of [`Self::busemann`].
    pub fn busemann_at(&self, ray_angle: f64, x: &ConePoint, t: f64) -> f64 {
        let target = ConePoint { r: t, theta: ray_angle };
        // d − t = (d² − t²)/(d + t) avoids cancellation at large t.
        let delta = self.angle_gap(ray_angle, x.theta);
        if delta >= PI {
            return x.r;
        }
        let d = self.distance(x, &target);
        (x.r * x.r - 2.0 * x.r * t * delta.cos()) / (d + t)
    }

    /// `h(x) = min` over `rays` uniformly spaced ray angles of the ray Busemann functions.
    pub fn soul_function(&self, x: &ConePoint, rays: usize) -> f64 {
        (0..rays.max(1))
            .map(|k| self.busemann(self.beta * k as f64 / rays.max(1) as f64, x))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn cone_distance(cone: &ConeSurface, p: &ConePoint, q: &ConePoint) -> f64 {
    cone.distance(p, q)
}

pub fn busemann_along_ray(cone: &ConeSurface, ray_angle: f64, x: &ConePoint) -> f64 {
    cone.busemann(ray_angle, x)
}

/// Interior angles of the geodesic triangle `abc`, at `a`, `b`, `c` in that order.
pub fn triangle_angles(cone: &ConeSurface, a: &ConePoint, b: &ConePoint, c: &ConePoint) -> Result<[f64; 3]> {
    let at = |p: &ConePoint, q: &ConePoint, s: &ConePoint| -> Result<f64> {
        if cone.distance(p, q) == 0.0 || cone.distance(p, s) == 0.0 {
            return Err(GeomError::Degenerate("triangle has coincident vertices".into()));
        }
        if p.is_apex() {
            return Ok(cone.angle_gap(q.theta, s.theta).min(PI));
        }
        let d1 = cone.geodesic(p, q).initial_direction().expect("non-apex start");
        let d2 = cone.geodesic(p, s).initial_direction().expect("non-apex start");
        Ok(wrap_pi(d1 - d2).abs())
    };
    Ok([at(a, b, c)?, at(b, c, a)?, at(c, a, b)?])
}

/// Whether the apex lies inside the geodesic triangle `abc`, decided by the winding
/// of the closed geodesic loop around it.
pub fn triangle_encloses_apex(cone: &ConeSurface, a: &ConePoint, b: &ConePoint, c: &ConePoint) -> bool {
    let turn = |p: &ConePoint, q: &ConePoint| match cone.geodesic(p, q) {
        Geodesic::Straight { delta, .. } => delta,
        Geodesic::ThroughApex { .. } => f64::NAN,
    };
    let total = turn(a, b) + turn(b, c) + turn(c, a);
    total.is_nan() || total.abs() > 0.5 * cone.beta()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub trials: usize,
    pub holds: bool,
    /// Largest `r − R` seen along any sampled geodesic (0 when none exceeds `R`).
    pub worst_violation: f64,
}

/// Samples chords of the ball `B_R(apex)` and checks that their geodesics stay inside.
pub fn ball_is_totally_convex<R: Rng + ?Sized>(
    cone: &ConeSurface,
    radius: f64,
    trials: usize,
    rng: &mut R,
) -> Result<ConvexityReport> {
    if !(radius > 0.0) {
        return Err(GeomError::domain("ball radius must be positive"));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = ConePoint { r: radius * rng.gen::<f64>().sqrt(), theta: rng.gen_range(0.0..cone.beta()) };
        let q = ConePoint { r: radius * rng.gen::<f64>().sqrt(), theta: rng.gen_range(0.0..cone.beta()) };
        let g = cone.geodesic(&p, &q);
        for k in 0..=32 {
            worst = worst.max(g.point_at(k as f64 / 32.0).r - radius);
        }
    }
    Ok(ConvexityReport { trials, holds: worst <= 1e-9, worst_violation: worst })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSoul {
    pub soul: ConePoint,
    /// Maximizer of the ray-Busemann soul function found by grid search and descent.
    pub search_maximizer: ConePoint,
    pub search_value: f64,
    pub rays: usize,
}

/// The soul of a cone with `β < 2π` is its apex; confirmed by maximizing the soul function.
pub fn cone_soul(cone: &ConeSurface) -> Result<ConeSoul> {
    if cone.beta() >= TAU {
        return Err(GeomError::NoUniqueSoul(
            "the plane has no distinguished point; every point is a soul of some ray family".into(),
        ));
    }
    let rays = 720;
    let h = |p: &ConePoint| cone.soul_function(p, rays);
    let mut best = ConePoint::new(1.0, 0.0)?;
    let mut best_val = h(&best);
    for i in 0..=40 {
        for j in 0..64 {
            let p = ConePoint { r: i as f64 / 40.0, theta: cone.beta() * j as f64 / 64.0 };
            let v = h(&p);
            if v > best_val {
                best = p;
                best_val = v;
            }
        }
    }
    // Compass refinement in the developed chart around the incumbent.
    let mut step = 1.0 / 40.0;
    while step > 1e-9 {
        let mut improved = false;
        for k in 0..8 {
            let dir = from_angle(k as f64 * PI / 4.0) * step;
            let cand = develop_step(&best, &dir);
            let v = h(&cand);
            if v > best_val {
                best = cand;
                best_val = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(ConeSoul { soul: ConePoint::apex(), search_maximizer: best, search_value: best_val, rays })
}

fn develop_step(p: &ConePoint, v: &Vector) -> ConePoint {
    let x = Point::new(p.r, 0.0) + v;
    if x.norm() == 0.0 {
        return ConePoint::apex();
    }
    ConePoint { r: x.norm(), theta: p.theta + x.y.atan2(x.x) }
}
