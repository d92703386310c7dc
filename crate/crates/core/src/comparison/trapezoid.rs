//! Trapezoid comparison: the Euclidean bound chain and realized trapezoids on planes
//! and cones.
//!
//! A realized trapezoid is built in the tangent plane at the hinge `p̂` (placed at the
//! origin): `φ3` runs along `e3 = (1, 0)`, `φ2` along `e2 = e^{iβ}` to
//! `q2 = (s / sin β)·e2`, and `σ` leaves `q2` in direction `ψ ∈ [β + π, 2π]`, which
//! keeps the hinge angle at `q2` at most `π − β`; `q1 = q2 + r·e^{iψ}`. On a cone the
//! apex sits at a developed position `O`, the three straight pieces are lifted to the
//! cone by tracking their winding around `O`, and `φ1` is the minimizing cone
//! geodesic from `p̂` to `q1`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{triangle_encloses_apex, ConePoint, ConeSurface};
use crate::geom::{cross, from_angle, wrap_pi};
use crate::model_trig::{comparison_angle, Curvature};
use crate::{GeomError, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidConfig {
    pub s: f64,
    pub r: f64,
    pub beta: f64,
    /// Largest possible `l`: the hinge at `q2` opened to `π − β`.
    pub l_hat: f64,
    /// Comparison angle at `p̂` (opposite `r`) in the triangle `(s / sin β, r, l̂)`.
    pub alpha1_hat: f64,
    pub alpha2_hat: f64,
    /// `l̂·sin α̂2`, the bound on the distance from `q1` to `φ3`.
    pub bound: f64,
}

pub fn trapezoid_bound(s: f64, r: f64, beta: f64) -> Result<TrapezoidConfig> {
    if !(s > 0.0 && r > 0.0) {
        return Err(GeomError::domain("s and r must be positive"));
    }
    if !(beta > 0.0 && beta < PI) {
        return Err(GeomError::domain(format!("β = {beta} outside (0, π)")));
    }
    let leg = s / beta.sin();
    let l_hat = (leg * leg + r * r + 2.0 * r * s / beta.tan()).max(0.0).sqrt();
    let alpha1_hat = comparison_angle(r, leg, l_hat, Curvature::Flat)?;
    let alpha2_hat = beta - alpha1_hat;
    Ok(TrapezoidConfig { s, r, beta, l_hat, alpha1_hat, alpha2_hat, bound: l_hat * alpha2_hat.sin() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface {
    Plane,
    Cone { beta: f64 },
}

impl Surface {
    fn cone(&self) -> Result<ConeSurface> {
        match *self {
            Surface::Plane => Ok(ConeSurface::plane()),
            Surface::Cone { beta } => ConeSurface::new(beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedTrapezoid {
    pub s: f64,
    pub r: f64,
    pub beta: f64,
    /// Direction of `σ` at `q2`.
    pub psi: f64,
    /// Developed apex position; `None` on the plane.
    pub apex: Option<Point>,
    pub hinge_angle: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub l: f64,
    /// `d(σ(r), φ3(l·cos α3))`.
    pub measured: f64,
    /// `d(σ(r), φ3(ℝ))` over the developed line of `φ3`, at most `measured`.
    pub line_distance: f64,
    pub encloses_apex: bool,
}

impl RealizedTrapezoid {
    pub fn slack(&self) -> f64 {
        self.measured - self.s
    }
}

/// Why a sampled configuration was not a valid instance of the theorem's hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// A developed piece passes (numerically) through the apex.
    HitsApex,
    /// `φ2`, `σ` or `φ3` is not minimizing on the cone.
    NotMinimizing,
    /// `φ1` does not start between `φ3` and `φ2`: `α2 + α3 ≠ β`.
    NotCoplanar,
}

/// Signed angle swept around `o` by the segment `a → b`.
fn winding(a: &Point, b: &Point, o: &Point) -> f64 {
    let (u, v) = (a - o, b - o);
    cross(&u, &v).atan2(u.dot(&v))
}

fn segment_clearance(a: &Point, b: &Point, o: &Point) -> f64 {
    let ab = b - a;
    let t = ((o - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + ab * t - o).norm()
}

/// Builds the trapezoid `(s, r, β, ψ)` in the plane from exact coordinates.
pub fn realize_planar(s: f64, r: f64, beta: f64, psi: f64) -> std::result::Result<RealizedTrapezoid, Rejection> {
    let q2 = from_angle(beta) * (s / beta.sin());
    let q1 = q2 + from_angle(psi) * r;
    let dir = q1.y.atan2(q1.x);
    let alpha3 = dir.abs();
    let alpha2 = wrap_pi(beta - dir).abs();
    if (alpha2 + alpha3 - beta).abs() > 1e-9 {
        return Err(Rejection::NotCoplanar);
    }
    let l = q1.norm();
    let foot = Point::new(l * alpha3.cos(), 0.0);
    Ok(RealizedTrapezoid {
        s,
        r,
        beta,
        psi,
        apex: None,
        hinge_angle: psi - beta - PI,
        alpha2,
        alpha3,
        l,
        measured: (q1 - foot).norm(),
        line_distance: q1.y.abs(),
        encloses_apex: false,
    })
}

/// Builds the trapezoid `(s, r, β, ψ)` on `cone` with developed apex `apex`.
pub fn realize(
    cone: &ConeSurface,
    s: f64,
    r: f64,
    beta: f64,
    psi: f64,
    apex: Point,
) -> std::result::Result<RealizedTrapezoid, Rejection> {
    let origin = Point::zeros();
    let clear = 1e-9;
    let q2 = from_angle(beta) * (s / beta.sin());
    let q1 = q2 + from_angle(psi) * r;
    if apex.norm() < clear || segment_clearance(&origin, &q2, &apex) < clear || segment_clearance(&q2, &q1, &apex) < clear
    {
        return Err(Rejection::HitsApex);
    }
    let lift = |x: &Point, theta: f64| ConePoint { r: (x - apex).norm(), theta };
    let p_hat = lift(&origin, 0.0);
    let theta_q2 = winding(&origin, &q2, &apex);
    let c_q2 = lift(&q2, theta_q2);
    let c_q1 = lift(&q1, theta_q2 + winding(&q2, &q1, &apex));
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b);
    if !rel(cone.distance(&p_hat, &c_q2), s / beta.sin()) || !rel(cone.distance(&c_q2, &c_q1), r) {
        return Err(Rejection::NotMinimizing);
    }

    let phi1 = cone.geodesic(&p_hat, &c_q1);
    let l = phi1.length();
    // Outward radial direction at p̂ in the developed frame points away from the apex.
    let outward = (-apex.y).atan2(-apex.x);
    let dir = outward + phi1.initial_direction().expect("p̂ is not the apex");
    let alpha3 = wrap_pi(dir).abs();
    let alpha2 = wrap_pi(beta - dir).abs();
    if (alpha2 + alpha3 - beta).abs() > 1e-9 {
        return Err(Rejection::NotCoplanar);
    }

    let foot = Point::new(l * alpha3.cos(), 0.0);
    if segment_clearance(&origin, &foot, &apex) < clear {
        return Err(Rejection::HitsApex);
    }
    let c_foot = lift(&foot, winding(&origin, &foot, &apex));
    if !rel(cone.distance(&p_hat, &c_foot), foot.x.abs()) {
        return Err(Rejection::NotMinimizing);
    }
    Ok(RealizedTrapezoid {
        s,
        r,
        beta,
        psi,
        apex: Some(apex),
        hinge_angle: psi - beta - PI,
        alpha2,
        alpha3,
        l,
        measured: cone.distance(&c_q1, &c_foot),
        line_distance: line_distance(cone, &c_q1, &apex, l + s / beta.sin() + r),
        encloses_apex: triangle_encloses_apex(cone, &p_hat, &c_q2, &c_q1),
    })
}

/// Distance from `x` to the lift of the developed line `ℝ·e3` for `|t| <= 2·reach`:
/// grid search followed by golden-section refinement.
fn line_distance(cone: &ConeSurface, x: &ConePoint, apex: &Point, reach: f64) -> f64 {
    let origin = Point::zeros();
    let at = |t: f64| {
        let p = Point::new(t, 0.0);
        let lifted = ConePoint { r: (p - apex).norm(), theta: winding(&origin, &p, apex) };
        cone.distance(x, &lifted)
    };
    let n = 400;
    let span = 2.0 * reach;
    let step = 2.0 * span / n as f64;
    let (mut best_t, mut best) = (0.0, at(0.0));
    for k in 0..=n {
        let t = -span + step * k as f64;
        let d = at(t);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if at(c) < at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.min(at(0.5 * (a + b)))
}

const ENCLOSING_TRIES: usize = 32;

/// Draws a developed apex position around which the sides `p̂ → q2 → q1` sweep more
/// than half the cone angle while each sweeps at most half, so that the geodesic
/// triangle `p̂ q2 q1` on the cone winds around the apex. Falls back to the last draw.
///
/// The apex is drawn inside the hinge wedge at `p̂`; elsewhere the short way from
/// `p̂` to `q1` almost never leaves between φ3 and φ2.
fn enclosing_apex<R: Rng + ?Sized>(cone_angle: f64, beta: f64, q2: &Point, q1: &Point, rng: &mut R) -> Point {
    let origin = Point::zeros();
    let half = 0.5 * cone_angle;
    // A segment of length L sweeps at most `half` from distance ~ L / (2 tan(half / 2)).
    let size = q2.norm().max(q1.norm()).max((q1 - q2).norm());
    let reach = size * (1.0 + 1.0 / (0.5 * half).tan()) + 0.1;
    let mut o = origin;
    for _ in 0..ENCLOSING_TRIES {
        o = from_angle(rng.gen_range(0.0..beta)) * (reach * rng.gen::<f64>());
        let (w1, w2) = (winding(&origin, q2, &o), winding(q2, q1, &o));
        if w1.abs() <= half && w2.abs() <= half && (w1 + w2).abs() > half {
            break;
        }
    }
    o
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidSweep {
    pub surface: Surface,
    pub valid: usize,
    pub skipped: usize,
    pub apex_enclosing: usize,
    pub worst_slack: f64,
    pub worst: Option<RealizedTrapezoid>,
    /// Configurations whose slack exceeded the tolerance.
    pub failures: Vec<RealizedTrapezoid>,
}

/// Samples `trials` valid trapezoids with `s ∈ (0, 0.3]`, `r ∈ [0.2, 2]`,
/// `β ∈ [0.2, π − 0.2]`. On cones at least `min_enclosing` of them have a
/// geodesic triangle `p̂ q2 q1` winding around the apex.
pub fn verify_trapezoid_on_surface<R: Rng + ?Sized>(
    surface: Surface,
    trials: usize,
    min_enclosing: f64,
    tol: f64,
    rng: &mut R,
) -> Result<TrapezoidSweep> {
    let cone = surface.cone()?;
    let singular = matches!(surface, Surface::Cone { .. });
    let mut sweep = TrapezoidSweep {
        surface,
        valid: 0,
        skipped: 0,
        apex_enclosing: 0,
        worst_slack: f64::NEG_INFINITY,
        worst: None,
        failures: Vec::new(),
    };
    let max_attempts = 2000 * trials.max(1);
    let mut attempts = 0;
    while sweep.valid < trials {
        attempts += 1;
        if attempts > max_attempts {
            return Err(GeomError::Numeric(format!(
                "trapezoid sampler produced only {} valid configurations in {max_attempts} attempts",
                sweep.valid
            )));
        }
        let s = 0.3 * (1.0 - rng.gen::<f64>());
        let r = rng.gen_range(0.2..=2.0);
        let beta = rng.gen_range(0.2..=PI - 0.2);
        // Half the draws use the window where the planar foot lies on φ3's side.
        let lo = beta + PI;
        let psi = if rng.gen_bool(0.5) {
            let window = (s / r).min(1.0).asin();
            rng.gen_range((2.0 * PI - window).max(lo)..=2.0 * PI)
        } else {
            rng.gen_range(lo..=2.0 * PI)
        };
        let q2 = from_angle(beta) * (s / beta.sin());
        let q1 = q2 + from_angle(psi) * r;
        let need_enclosing = singular && (sweep.apex_enclosing as f64) < min_enclosing * (sweep.valid + 1) as f64;
        let apex = if !singular {
            Point::zeros()
        } else if need_enclosing || rng.gen_bool(0.3) {
            enclosing_apex(cone.beta(), beta, &q2, &q1, rng)
        } else {
            let reach = 1.5 * q2.norm().max(q1.norm()) + 0.1;
            let rho = reach * rng.gen::<f64>().sqrt();
            from_angle(rng.gen_range(0.0..2.0 * PI)) * rho
        };
        let built = if singular { realize(&cone, s, r, beta, psi, apex) } else { realize_planar(s, r, beta, psi) };
        match built {
            Ok(t) if need_enclosing && !t.encloses_apex => sweep.skipped += 1,
            Ok(t) => {
                sweep.valid += 1;
                sweep.apex_enclosing += usize::from(t.encloses_apex);
                if t.slack() > sweep.worst_slack {
                    sweep.worst_slack = t.slack();
                    sweep.worst = Some(t);
                }
                if t.slack() > tol {
                    sweep.failures.push(t);
                }
            }
            Err(_) => sweep.skipped += 1,
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn right_angle_closed_form() {
        let (s, r) = (0.3, 1.2);
        let c = trapezoid_bound(s, r, PI / 2.0).unwrap();
        assert_abs_diff_eq!(c.l_hat, (s * s + r * r).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.alpha2_hat, (s / r).atan(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.bound, s, epsilon = 1e-12);
    }

    #[test]
    fn obtuse_example_against_coordinates() {
        let (s, r, beta) = (0.1, 1.0, 2.0 * PI / 3.0);
        let c = trapezoid_bound(s, r, beta).unwrap();
        let expected = 0.01 / 0.75 + 1.0 + 2.0 * 0.1 * (-1.0 / 3f64.sqrt());
        assert_abs_diff_eq!(c.l_hat * c.l_hat, expected, epsilon = 1e-14);
        // Oracle: the planar trapezoid with the hinge at q2 fully opened.
        let q1 = from_angle(beta) * (s / beta.sin()) + Point::new(r, 0.0);
        assert_abs_diff_eq!(q1.norm(), c.l_hat, epsilon = 1e-14);
        assert_abs_diff_eq!(q1.y.atan2(q1.x), c.alpha2_hat, epsilon = 1e-12);
        assert!(c.bound <= s + 1e-9);
    }

    #[test]
    fn degenerate_and_invalid() {
        let c = trapezoid_bound(1e-9, 1.0, 1.0).unwrap();
        assert!(c.bound < 1e-8 && c.alpha2_hat < 1e-8);
        assert!(trapezoid_bound(0.1, 1.0, PI).is_err());
        assert!(trapezoid_bound(0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn planar_rectangle_is_equality_case() {
        let t = realize_planar(0.2, 1.0, PI / 2.0, 2.0 * PI).unwrap();
        assert_abs_diff_eq!(t.measured, 0.2, epsilon = 1e-15);
        // A cone whose apex is far from the figure behaves like the plane.
        let c = ConeSurface::new(1.5 * PI).unwrap();
        let t = realize(&c, 0.2, 1.0, PI / 2.0, 2.0 * PI, Point::new(0.5, -40.0)).unwrap();
        assert_abs_diff_eq!(t.measured, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn small_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plane = verify_trapezoid_on_surface(Surface::Plane, 500, 0.0, 1e-9, &mut rng).unwrap();
        assert!(plane.worst_slack <= 1e-9, "{:?}", plane.worst);
        for beta_c in [0.5 * PI, 1.5 * PI] {
            let cone = verify_trapezoid_on_surface(Surface::Cone { beta: beta_c }, 500, 0.1, 1e-7, &mut rng).unwrap();
            assert!(cone.apex_enclosing * 10 >= cone.valid);
            // Violations only ever come from triangles around the apex, and the
            // distance to the whole line through φ3 still obeys the bound.
            for f in &cone.failures {
                assert!(f.encloses_apex, "{f:?}");
                assert!(f.line_distance <= f.s + 1e-7, "{f:?}");
            }
        }
    }

    #[test]
    fn enclosing_counterexample() {
        let cone = ConeSurface::new(1.5 * PI).unwrap();
        let apex = Point::new(-0.03274561039853713, 0.05886333796335874);
        let (s, r, beta, psi) = (0.23244986636544987, 0.4738301888037021, 2.8779350445814664, 6.16164902305177);
        let t = realize(&cone, s, r, beta, psi, apex).unwrap();
        assert!(t.encloses_apex);
        assert_abs_diff_eq!(t.measured, 0.41689, epsilon = 1e-4);
        assert!(t.measured > s + 0.1);
        assert!(t.line_distance <= s);
        assert!(trapezoid_bound(s, r, beta).unwrap().alpha2_hat > PI / 2.0);
    }

    proptest! {
        #[test]
        fn bound_chain(s in 1e-3f64..0.3, r in 0.2f64..2.0, beta in 0.2f64..(PI - 0.2)) {
            let c = trapezoid_bound(s, r, beta).unwrap();
            prop_assert!(c.alpha2_hat >= -1e-12);
            prop_assert!(c.bound <= s + 1e-9);
            let lhs = c.l_hat * c.l_hat;
            let rhs = s * s / beta.sin().powi(2) + r * r + 2.0 * r * s / beta.tan();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
