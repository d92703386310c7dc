//! Gradient of the distance to the boundary of a convex polygon and its unit-speed
//! level semi-flow `d⁺x/dt = ∇h/|∇h|²`.
//!
//! With `U` the outward normals of the nearest facets, `h` has directional derivative
//! `−cos ∠(ξ, U)`. If `U` fits in an arc of half-angle `α < π/2` centred at `c`, the
//! gradient is `−c·cos α`; otherwise `x` is critical. Between changes of the active set
//! the velocity `−c / cos α` is constant, so trajectories are polygonal and can be
//! integrated exactly: each step is clipped to land on the next crossing.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convex_domain::{angular_excess, Erosion, HalfplaneBody};
use crate::geom::from_angle;
use crate::{angle_between, GeomError, Point, Result, Vector};

/// `|∇h|` below this is treated as a critical point.
pub const CRITICAL_GRAD: f64 = 1e-9;
const TINY_STEP: f64 = 1e-12;
const MAX_TINY_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestDirections {
    pub base: Point,
    pub distance: f64,
    /// Facet indices attaining the distance.
    pub facets: Vec<usize>,
    pub directions: Vec<Vector>,
    /// Half the length of the smallest arc holding all directions; `π/2` when no open
    /// half-circle holds them.
    pub span_half_angle: f64,
    /// Unit centre of that arc (meaningless when `span_half_angle == π/2`).
    pub center: Vector,
}

fn active_tol(body: &HalfplaneBody) -> f64 {
    1e-10 * (1.0 + body.diameter())
}

/// Active facets at `x` without interior checks; shared by the flow, which may start
/// on the boundary.
fn active_set(body: &HalfplaneBody, x: &Point) -> NearestDirections {
    let level = body.min_slack(x);
    let tol = active_tol(body);
    let facets: Vec<usize> = (0..body.len()).filter(|&i| body.slack(i, x) - level <= tol).collect();
    let directions: Vec<Vector> = facets.iter().map(|&i| body.normal(i)).collect();
    let (span_half_angle, center) = smallest_arc(&directions);
    NearestDirections { base: *x, distance: level, facets, directions, span_half_angle, center }
}

/// Half-angle and centre of the smallest arc containing unit vectors `dirs`.
fn smallest_arc(dirs: &[Vector]) -> (f64, Vector) {
    let mut ang: Vec<f64> = dirs.iter().map(|d| d.y.atan2(d.x)).collect();
    ang.sort_by(f64::total_cmp);
    let n = ang.len();
    if n == 1 {
        return (0.0, dirs[0]);
    }
    // The arc is the complement of the largest gap between consecutive angles.
    let (mut gap, mut after) = (ang[0] + TAU - ang[n - 1], 0);
    for k in 1..n {
        let g = ang[k] - ang[k - 1];
        if g > gap {
            gap = g;
            after = k;
        }
    }
    let span = TAU - gap;
    if span >= PI - 1e-12 {
        return (FRAC_PI_2, Vector::zeros());
    }
    let start = ang[after];
    (0.5 * span, from_angle(start + 0.5 * span))
}

pub fn nearest_directions(body: &HalfplaneBody, x: &Point) -> Result<NearestDirections> {
    let level = body.min_slack(x);
    if level < -body.tol() {
        return Err(GeomError::domain(format!("({}, {}) lies outside the body", x.x, x.y)));
    }
    if level <= body.tol() {
        return Err(GeomError::Degenerate(format!("({}, {}) lies on the boundary", x.x, x.y)));
    }
    Ok(active_set(body, x))
}

fn gradient_from(nd: &NearestDirections) -> Vector {
    if nd.span_half_angle >= FRAC_PI_2 {
        return Vector::zeros();
    }
    -nd.center * nd.span_half_angle.cos()
}

pub fn gradient_of_h(body: &HalfplaneBody, x: &Point) -> Result<Vector> {
    Ok(gradient_from(&nearest_directions(body, x)?))
}

/// `d_x h(ξ) = −cos(min angle from ξ to the nearest directions)`.
pub fn directional_derivative(body: &HalfplaneBody, x: &Point, xi: &Vector) -> Result<f64> {
    let nd = nearest_directions(body, x)?;
    let min_angle = nd.directions.iter().map(|d| angle_between(xi, d)).fold(f64::INFINITY, f64::min);
    Ok(-min_angle.cos() * xi.norm())
}

/// Half the diameter of the space of directions of the sup-level set `{h >= h(x)}` at
/// `x`, measured from the eroded polygon's vertex angle. Equals `π/2` at smooth points.
pub fn direction_space_half_diameter(body: &HalfplaneBody, x: &Point) -> Result<f64> {
    let level = nearest_directions(body, x)?.distance;
    let eroded = match body.inner_parallel(level)? {
        Erosion::Body(b) => b,
        _ => return Err(GeomError::Degenerate("x lies on the maximum set".into())),
    };
    let v = eroded.vertices();
    let n = v.len();
    let (k, dist) = (0..n)
        .map(|k| (k, (v[k] - x).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("polygon has vertices");
    if dist > 1e-7 * (1.0 + body.diameter()) {
        return Ok(FRAC_PI_2);
    }
    let prev = v[(k + n - 1) % n] - v[k];
    let next = v[(k + 1) % n] - v[k];
    Ok(0.5 * angle_between(&prev, &next))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub t: f64,
    pub position: Point,
    /// `h` at the position, evaluated directly from the body.
    pub level: f64,
    pub grad_norm: f64,
    /// Unit left-derivative direction at this point (`None` at the start).
    pub left_direction: Option<Vector>,
    /// Unit right-derivative direction (`None` once critical).
    pub right_direction: Option<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Critical,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub position: Point,
    pub level: f64,
    pub left_direction: Option<Vector>,
    pub step_log: Vec<FlowStep>,
    /// Times at which the active facet set changed.
    pub events: Vec<f64>,
    pub termination: Termination,
}

impl FlowState {
    pub fn elapsed(&self) -> f64 {
        self.step_log.last().map_or(0.0, |s| s.t)
    }

    /// `max |level(t) − level(0) − t|` over the log.
    pub fn level_growth_error(&self) -> f64 {
        let Some(first) = self.step_log.first() else { return 0.0 };
        self.step_log.iter().map(|s| (s.level - first.level - s.t).abs()).fold(0.0, f64::max)
    }
}

/// Integrates the level semi-flow from `x0` for at most `t_max`, logging every `dt`.
pub fn sharafutdinov_flow(body: &HalfplaneBody, x0: &Point, dt: f64, t_max: f64) -> Result<FlowState> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(GeomError::domain("need dt > 0 and t_max >= 0"));
    }
    if body.min_slack(x0) < -body.tol() {
        return Err(GeomError::domain(format!("start ({}, {}) lies outside the body", x0.x, x0.y)));
    }
    let mut x = *x0;
    let mut t = 0.0;
    let mut left: Option<Vector> = None;
    let mut log = Vec::new();
    let mut events = Vec::new();
    let mut tiny = 0usize;
    let mut last_active: Vec<usize> = Vec::new();
    loop {
        let nd = active_set(body, &x);
        let grad = gradient_from(&nd);
        let g = grad.norm();
        if nd.facets != last_active {
            if t > 0.0 {
                events.push(t);
            }
            last_active = nd.facets.clone();
        }
        let critical = g < CRITICAL_GRAD;
        let right = (!critical).then(|| -nd.center);
        log.push(FlowStep { t, position: x, level: nd.distance, grad_norm: g, left_direction: left, right_direction: right });
        if critical {
            return Ok(FlowState { position: x, level: nd.distance, left_direction: left, step_log: log, events, termination: Termination::Critical });
        }
        if t >= t_max {
            return Ok(FlowState { position: x, level: nd.distance, left_direction: left, step_log: log, events, termination: Termination::TimeLimit });
        }
        let v = grad / (g * g);
        // Earliest time at which an inactive facet joins the minimum.
        let mut step = dt.min(t_max - t);
        for i in 0..body.len() {
            if nd.facets.contains(&i) {
                continue;
            }
            let rate = 1.0 + body.normal(i).dot(&v);
            if rate > 0.0 {
                let tau = (body.slack(i, &x) - nd.distance) / rate;
                if tau < step {
                    step = tau.max(0.0);
                }
            }
        }
        if step < TINY_STEP {
            tiny += 1;
            if tiny > MAX_TINY_STEPS {
                return Err(GeomError::Stiffness { t, reason: "active set keeps changing without progress".into() });
            }
        } else {
            tiny = 0;
        }
        x += v * step;
        t += step;
        left = right;
    }
}

/// Samples `pairs` point pairs on common level sets `{h = c}`, flows both up by the
/// same random rise and returns the worst ratio `d_after / d_before`.
pub fn retraction_nonexpansion_check<R: Rng + ?Sized>(
    body: &HalfplaneBody,
    pairs: usize,
    dt: f64,
    rng: &mut R,
) -> Result<NonexpansionReport> {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < pairs {
        let c = rng.gen_range(0.0..0.6) * body.inradius();
        let rise = rng.gen_range(0.05..0.35) * body.inradius();
        let level_body = match body.inner_parallel(c)? {
            Erosion::Body(b) => b,
            _ => continue,
        };
        let a = random_boundary_point(&level_body, rng);
        let b = random_boundary_point(&level_body, rng);
        let before = (a - b).norm();
        if before < 1e-6 {
            continue;
        }
        let fa = sharafutdinov_flow(body, &a, dt, rise)?;
        let fb = sharafutdinov_flow(body, &b, dt, rise)?;
        worst = worst.max((fa.position - fb.position).norm() / before);
        used += 1;
    }
    Ok(NonexpansionReport { pairs, worst_ratio: worst })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonexpansionReport {
    pub pairs: usize,
    pub worst_ratio: f64,
}

/// Uniform point on the boundary of a polygon (by arc length).
pub fn random_boundary_point<R: Rng + ?Sized>(body: &HalfplaneBody, rng: &mut R) -> Point {
    let v = body.vertices();
    let n = v.len();
    let lens: Vec<f64> = (0..n).map(|k| (v[(k + 1) % n] - v[k]).norm()).collect();
    let mut s = rng.gen_range(0.0..lens.iter().sum::<f64>());
    for k in 0..n {
        if s <= lens[k] || k + 1 == n {
            let f = (s / lens[k]).clamp(0.0, 1.0);
            return v[k] + (v[(k + 1) % n] - v[k]) * f;
        }
        s -= lens[k];
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub t: f64,
    pub level: f64,
    pub theta: f64,
}

/// Flows from the boundary point `x0` and samples `θ_t(r)` on the eroded body
/// `{h >= h(x_t)}` at `x_t` with `u = −(left direction)` (the initial right direction
/// reversed at `t = 0`). Sampling stops once the eroded body is too thin for radius `r`.
pub fn theta_monotonicity_experiment(
    body: &HalfplaneBody,
    x0: &Point,
    r: f64,
    dt: f64,
    samples: usize,
) -> Result<Vec<ThetaSample>> {
    if body.min_slack(x0).abs() > 1e-9 * (1.0 + body.diameter()) {
        return Err(GeomError::precondition("start point must lie on the boundary"));
    }
    let flow = sharafutdinov_flow(body, x0, dt, f64::INFINITY)?;
    let log = &flow.step_log;
    let stride = (log.len() / samples.max(1)).max(1);
    let mut out = Vec::new();
    for (k, step) in log.iter().enumerate() {
        if k % stride != 0 && k + 1 != log.len() {
            continue;
        }
        let Some(dir) = step.left_direction.or(step.right_direction) else { break };
        let eroded = match body.inner_parallel(step.level.max(0.0))? {
            Erosion::Body(b) => b,
            _ => break,
        };
        match angular_excess(&eroded, &step.position, &(-dir), r) {
            Ok(theta) => out.push(ThetaSample { t: step.t, level: step.level, theta }),
            Err(GeomError::EmptyRegion(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// CSV with columns `t,x,y,level,grad_norm,theta_r`; `theta` is matched to the log by time.
pub fn write_trajectory_csv<W: Write>(flow: &FlowState, theta: &[ThetaSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| GeomError::Internal(format!("csv: {e}"));
    w.write_record(["t", "x", "y", "level", "grad_norm", "theta_r"]).map_err(io)?;
    let mut th = theta.iter().peekable();
    for s in &flow.step_log {
        let cell = match th.peek() {
            Some(ts) if ts.t == s.t => {
                let v = ts.theta;
                th.next();
                format!("{v:.12e}")
            }
            _ => String::new(),
        };
        w.write_record([
            format!("{:.12e}", s.t),
            format!("{:.12e}", s.position.x),
            format!("{:.12e}", s.position.y),
            format!("{:.12e}", s.level),
            format!("{:.12e}", s.grad_norm),
            cell,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| GeomError::Internal(format!("csv: {e}")))?;
    Ok(())
}

/// Random unit vector, handy for property sweeps.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector {
    from_angle(rng.gen_range(-PI..PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_domain::generators::{disk, rect, stadium41a};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn nearest_direction_examples() {
        let sq = rect(1.0, 1.0).unwrap();
        let nd = nearest_directions(&sq, &Point::new(0.5, 0.0)).unwrap();
        assert_eq!(nd.directions, vec![Vector::new(1.0, 0.0)]);
        assert_eq!(nd.span_half_angle, 0.0);
        let nd = nearest_directions(&sq, &Point::new(0.3, 0.3)).unwrap();
        assert_eq!(nd.directions.len(), 2);
        assert_abs_diff_eq!(nd.span_half_angle, FRAC_PI_4, epsilon = 1e-15);
        let nd = nearest_directions(&sq, &Point::new(0.0, 0.0)).unwrap();
        assert_eq!(nd.directions.len(), 4);
        assert_eq!(nd.span_half_angle, FRAC_PI_2);
        assert!(matches!(nearest_directions(&sq, &Point::new(1.0, 0.0)), Err(GeomError::Degenerate(_))));
        assert!(matches!(nearest_directions(&sq, &Point::new(2.0, 0.0)), Err(GeomError::Domain(_))));
    }

    #[test]
    fn gradient_examples() {
        let sq = rect(1.0, 1.0).unwrap();
        let g = gradient_of_h(&sq, &Point::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!((g - Vector::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let g = gradient_of_h(&sq, &Point::new(0.3, 0.3)).unwrap();
        let expected = Vector::new(-1.0, -1.0) / 2f64.sqrt() * FRAC_PI_4.cos();
        assert_abs_diff_eq!((g - expected).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.norm(), 0.5f64.sqrt(), epsilon = 1e-15);
        let beta = direction_space_half_diameter(&sq, &Point::new(0.3, 0.3)).unwrap();
        assert_abs_diff_eq!(g.norm(), beta.sin(), epsilon = 1e-12);
        assert_eq!(gradient_of_h(&sq, &Point::new(0.0, 0.0)).unwrap(), Vector::zeros());
    }

    #[test]
    fn square_flow_from_edge_midpoint() {
        let sq = rect(1.0, 1.0).unwrap();
        let f = sharafutdinov_flow(&sq, &Point::new(1.0, 0.0), 1e-4, 10.0).unwrap();
        assert_eq!(f.termination, Termination::Critical);
        assert_abs_diff_eq!(f.position.norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.elapsed(), 1.0, epsilon = 1e-12);
        assert!(f.step_log.iter().all(|s| s.position.y == 0.0));
        assert!(f.level_growth_error() <= 10.0 * 1e-4);
    }

    #[test]
    fn rectangle_corner_flow_ends_at_segment_end() {
        let r = rect(2.0, 1.0).unwrap();
        let f = sharafutdinov_flow(&r, &Point::new(2.0, 1.0), 1e-4, 10.0).unwrap();
        assert_eq!(f.termination, Termination::Critical);
        assert_abs_diff_eq!((f.position - Point::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.elapsed(), 1.0, epsilon = 1e-12);
        for s in &f.step_log {
            assert_abs_diff_eq!(s.position.x - s.position.y, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn flow_from_soul_is_immediately_critical() {
        let s = stadium41a(128).unwrap();
        let f = sharafutdinov_flow(&s, &Point::new(0.0, 0.0), 1e-4, 10.0).unwrap();
        assert_eq!(f.step_log.len(), 1);
        assert_eq!(f.termination, Termination::Critical);
    }

    #[test]
    fn stadium_flow_stays_inside_with_unit_growth() {
        let s = stadium41a(128).unwrap();
        let f = sharafutdinov_flow(&s, &Point::new(6.0, 0.0), 1e-3, 10.0).unwrap();
        assert!(f.level_growth_error() <= 1e-2);
        assert!(f.step_log.iter().all(|st| s.boundary_distance(&st.position) >= -1e-9));
        assert!(f.step_log.iter().all(|st| st.grad_norm > 0.0 && st.grad_norm <= 1.0 + 1e-15 || st.t == f.elapsed()));
    }

    #[test]
    fn theta_examples() {
        let r = rect(2.0, 1.0).unwrap();
        let th = theta_monotonicity_experiment(&r, &Point::new(2.0, 1.0), 0.2, 1e-3, 50).unwrap();
        assert!(th.len() > 10);
        for s in &th {
            assert_abs_diff_eq!(s.theta, FRAC_PI_4, epsilon = 1e-12);
        }
        let radius = 1.0;
        let d = disk(radius, 512).unwrap();
        let th = theta_monotonicity_experiment(&d, &Point::new(radius, 0.0), 0.2, 1e-3, 40).unwrap();
        for w in th.windows(2) {
            assert!(w[1].theta >= w[0].theta - 1e-12);
        }
        for s in &th {
            let exact = (0.2 / (2.0 * (radius - s.t))).asin();
            assert_abs_diff_eq!(s.theta, exact, epsilon = 2e-2);
        }
    }

    #[test]
    fn retraction_contracts_on_disk() {
        let d = disk(1.0, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = retraction_nonexpansion_check(&d, 100, 1e-3, &mut rng).unwrap();
        assert!(rep.worst_ratio < 1.0 + 1e-9);
    }

    proptest! {
        #[test]
        fn gradient_satisfies_gradient_definition(x in -0.99f64..0.99, y in -0.99f64..0.99, w in -PI..PI) {
            let body = rect(1.0, 1.0).unwrap();
            let p = Point::new(x, 0.7 * y);
            let g = gradient_of_h(&body, &p).unwrap();
            let xi = from_angle(w);
            prop_assert!(directional_derivative(&body, &p, &xi).unwrap() <= g.dot(&xi) + 1e-8);
            let n = g.norm();
            if n > CRITICAL_GRAD {
                let along = directional_derivative(&body, &p, &(g / n)).unwrap();
                prop_assert!((along * n - n * n).abs() <= 1e-8);
            }
        }
    }
}
