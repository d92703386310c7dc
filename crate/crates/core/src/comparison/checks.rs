//! Sampled property checks: total convexity of level sets, no re-entry of extended
//! chords, flat angles at interior points of a segment max set, and the second
//! difference bound for half squared distance.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde_json::json;

use super::VerificationReport;
use crate::cone::{ConePoint, ConeSurface};
use crate::convex_domain::{Erosion, HalfplaneBody, MaxSet};
use crate::geom::{from_angle, rotate};
use crate::grad_flow::random_boundary_point;
use crate::{angle_between, GeomError, Point, Result};

const CHORD_SAMPLES: usize = 32;
const MAX_FAILURES: usize = 20;

fn record(report: &mut VerificationReport, slack: f64, tol: f64, detail: impl FnOnce() -> serde_json::Value) {
    report.worst_slack = report.worst_slack.max(slack);
    if slack > tol && report.failures.len() < MAX_FAILURES {
        report.failures.push(detail());
    }
}

fn report(check: &str, trials: usize) -> VerificationReport {
    VerificationReport { check: check.into(), trials, worst_slack: f64::NEG_INFINITY, failures: Vec::new() }
}

/// Uniform interior point by rejection from the bounding box.
pub fn random_interior_point<R: Rng + ?Sized>(body: &HalfplaneBody, rng: &mut R) -> Point {
    let v = body.vertices();
    let (lo, hi) = v.iter().fold((v[0], v[0]), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
    loop {
        let p = Point::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if body.min_slack(&p) >= 0.0 {
            return p;
        }
    }
}

fn level_body(body: &HalfplaneBody, c: f64) -> Result<HalfplaneBody> {
    match body.inner_parallel(c)? {
        Erosion::Body(b) => Ok(b),
        _ => Err(GeomError::precondition(format!("level {c} leaves no two-dimensional sup-level set"))),
    }
}

/// Samples `chords` segments with endpoints in `Ω_c = {h >= c}` and records the worst
/// `c − h` along them. Slack is positive only if a chord leaves `Ω_c`.
pub fn eroded_body_convexity_check<R: Rng + ?Sized>(
    body: &HalfplaneBody,
    c: f64,
    chords: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let omega = level_body(body, c)?;
    let tol = 1e-12 * (1.0 + body.diameter());
    let mut rep = report("eroded_body_convexity", chords);
    for _ in 0..chords {
        let a = random_interior_point(&omega, rng);
        let b = random_interior_point(&omega, rng);
        for k in 0..=CHORD_SAMPLES {
            let x = a + (b - a) * (k as f64 / CHORD_SAMPLES as f64);
            let slack = c - body.min_slack(&x);
            record(&mut rep, slack, tol, || json!({"a": [a.x, a.y], "b": [b.x, b.y], "at": [x.x, x.y]}));
        }
    }
    Ok(rep)
}

/// Samples chords with both endpoints on the level set `∂Ω_c`, extends them past both
/// endpoints by up to the body's diameter, and records the worst `h − c` on the
/// extensions (`h` is the concave min-affine extension of the boundary distance).
/// A positive value would mean the extension re-enters the open sup-level set.
pub fn quasigeodesic_exit_check<R: Rng + ?Sized>(
    body: &HalfplaneBody,
    c: f64,
    chords: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let omega = level_body(body, c)?;
    let tol = 1e-12 * (1.0 + body.diameter());
    let reach = body.diameter();
    let mut rep = report("quasigeodesic_exit", chords);
    let mut used = 0;
    while used < chords {
        let a = random_boundary_point(&omega, rng);
        let b = random_boundary_point(&omega, rng);
        let len = (b - a).norm();
        if len < 1e-9 {
            continue;
        }
        used += 1;
        let dir = (b - a) / len;
        for k in 1..=CHORD_SAMPLES {
            let t = reach * k as f64 / CHORD_SAMPLES as f64;
            for x in [b + dir * t, a - dir * t] {
                let slack = body.min_slack(&x) - c;
                record(&mut rep, slack, tol, || json!({"a": [a.x, a.y], "b": [b.x, b.y], "at": [x.x, x.y]}));
            }
        }
    }
    Ok(rep)
}

/// Cone version with `h = −r`: chords between points on the circle `r = ρ` are extended
/// along their developed lines (through-apex chords continue radially) and `ρ − r` is
/// recorded on the extensions.
pub fn cone_quasigeodesic_exit_check<R: Rng + ?Sized>(
    cone: &ConeSurface,
    rho: f64,
    chords: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    if !(rho > 0.0) {
        return Err(GeomError::domain("level radius must be positive"));
    }
    let tol = 1e-12 * (1.0 + rho);
    let mut rep = report("cone_quasigeodesic_exit", chords);
    for _ in 0..chords {
        let p = ConePoint { r: rho, theta: rng.gen_range(0.0..cone.beta()) };
        let q = ConePoint { r: rho, theta: rng.gen_range(0.0..cone.beta()) };
        let delta = cone.angle_gap(p.theta, q.theta);
        for k in 1..=CHORD_SAMPLES {
            let t = 2.0 * rho * k as f64 / CHORD_SAMPLES as f64;
            let r = if delta >= std::f64::consts::PI {
                rho + t
            } else {
                // Developed: p at (ρ, 0), q at ρ·e^{iδ}; by symmetry both extensions agree.
                let a = Point::new(rho, 0.0);
                let b = from_angle(delta) * rho;
                let len = (b - a).norm();
                if len == 0.0 {
                    rho
                } else {
                    (b + (b - a) * (t / len)).norm()
                }
            };
            let slack = rho - r;
            record(&mut rep, slack, tol, || json!({"theta_p": p.theta, "theta_q": q.theta, "t": t}));
        }
    }
    Ok(rep)
}

/// At an interior point `x` of a segment max set `A₀`, samples directions, checks that no
/// direction has both angles to `A₀` above `π/2` (the tangent cone splits off the
/// segment line), projects each probe to the at-least-normal set, and returns the worst
/// `|∠(v, y − x) − π/2|` over points `y ∈ A₀` on both sides of `x`.
pub fn interior_flat_angle_check<R: Rng + ?Sized>(
    body: &HalfplaneBody,
    x: &Point,
    probes: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let (from, to) = match body.inradius_and_max_set()?.1 {
        MaxSet::Segment { from, to, .. } => (from, to),
        MaxSet::Point { .. } => return Err(GeomError::precondition("max set is a point, not a segment")),
    };
    let tol = body.tol();
    let len = (to - from).norm();
    let w = (to - from) / len;
    let along = (x - from).dot(&w);
    let off = (x - from - w * along).norm();
    if off > tol || along < -tol || along > len + tol {
        return Err(GeomError::precondition("x does not lie on the max set"));
    }
    if along <= tol || along >= len - tol {
        return Err(GeomError::precondition("x is an endpoint of the max set"));
    }
    // Points of A₀ on each side of x, at several distances.
    let witnesses: Vec<Point> = [0.25, 0.5, 1.0]
        .iter()
        .flat_map(|f| [x + w * (f * (len - along)), x - w * (f * along)])
        .collect();
    let mut rep = report("interior_flat_angle", probes);
    for _ in 0..probes {
        let v = from_angle(rng.gen_range(0.0..std::f64::consts::TAU));
        let min_raw = witnesses.iter().map(|y| angle_between(&v, &(y - x))).fold(f64::INFINITY, f64::min);
        // A direction with every angle above π/2 would contradict the splitting.
        record(&mut rep, min_raw - FRAC_PI_2, 1e-9, || json!({"kind": "splitting", "v": [v.x, v.y]}));
        let normal = rotate(&w, if v.dot(&rotate(&w, FRAC_PI_2)) >= 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 });
        for y in &witnesses {
            let dev = (angle_between(&normal, &(y - x)) - FRAC_PI_2).abs();
            record(&mut rep, dev, 1e-9, || json!({"kind": "deviation", "v": [normal.x, normal.y], "y": [y.x, y.y]}));
        }
    }
    Ok(rep)
}

/// Second difference quotients of `f = ½ d(·, ŷ)²` along sampled unit-speed geodesics of
/// a cone (the plane when `β = 2π`); slack is `quotient − 1`. Every fourth base point
/// `ŷ` is the apex.
pub fn second_difference_check<R: Rng + ?Sized>(
    cone: &ConeSurface,
    geodesics: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut rep = report("second_difference", geodesics);
    let point = |rng: &mut R| ConePoint { r: rng.gen_range(0.0..2.0), theta: rng.gen_range(0.0..cone.beta()) };
    for i in 0..geodesics {
        let p = point(rng);
        let q = point(rng);
        let yhat = if i % 4 == 0 { ConePoint::apex() } else { point(rng) };
        let g = cone.geodesic(&p, &q);
        let len = g.length();
        if len < 1e-3 {
            continue;
        }
        let h = 1e-3;
        let s = rng.gen_range(h..len - h);
        let f = |t: f64| 0.5 * cone.distance(&g.point_at(t / len), &yhat).powi(2);
        let quotient = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        record(&mut rep, quotient - 1.0, 1e-6, || {
            json!({"p": [p.r, p.theta], "q": [q.r, q.theta], "yhat": [yhat.r, yhat.theta], "s": s, "quotient": quotient})
        });
    }
    Ok(rep)
}

/// Triangle inequality `d(a, c) <= d(a, b) + d(b, c)` on random triples; slack is the
/// excess of the left side.
pub fn cone_triangle_inequality_check<R: Rng + ?Sized>(
    cone: &ConeSurface,
    triples: usize,
    rng: &mut R,
) -> VerificationReport {
    let mut rep = report("cone_triangle_inequality", triples);
    for _ in 0..triples {
        let [a, b, c] = [0; 3].map(|_| ConePoint { r: rng.gen_range(0.0..3.0), theta: rng.gen_range(0.0..cone.beta()) });
        let slack = cone.distance(&a, &c) - cone.distance(&a, &b) - cone.distance(&b, &c);
        record(&mut rep, slack, 1e-9, || json!({"a": [a.r, a.theta], "b": [b.r, b.theta], "c": [c.r, c.theta]}));
    }
    rep
}

/// Chords of the ball `B_R(apex)` as a verification report; slack is `r − R` along them.
pub fn cone_ball_convexity_check<R: Rng + ?Sized>(
    cone: &ConeSurface,
    radius: f64,
    chords: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let r = crate::cone::ball_is_totally_convex(cone, radius, chords, rng)?;
    let mut rep = report("cone_ball_convexity", chords);
    rep.worst_slack = r.worst_violation;
    if !r.holds {
        rep.failures.push(json!({"radius": radius, "worst_violation": r.worst_violation}));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_domain::generators::{rect, stadium41a};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn square_level_sets_convex_and_no_reentry() {
        let sq = rect(1.0, 1.0).unwrap();
        let mut g = rng();
        let conv = eroded_body_convexity_check(&sq, 0.3, 2000, &mut g).unwrap();
        assert!(conv.failures.is_empty() && conv.worst_slack <= 1e-12, "{conv:?}");
        let exit = quasigeodesic_exit_check(&sq, 0.3, 1000, &mut g).unwrap();
        assert!(exit.failures.is_empty(), "{exit:?}");
        // Chords near the endpoints sit on the level set.
        assert!(exit.worst_slack.abs() <= 1e-12);
    }

    #[test]
    fn facet_chord_stays_on_level() {
        // Case of a chord inside ∂Ω_c: h ≡ c along the facet, then drops.
        let sq = rect(1.0, 1.0).unwrap();
        let c = 0.25;
        let a = Point::new(-0.75, 0.75);
        let b = Point::new(0.75, 0.75);
        for k in 0..=10 {
            let x = a + (b - a) * (k as f64 / 10.0);
            assert!((sq.min_slack(&x) - c).abs() < 1e-15);
        }
        for t in [0.1, 0.5, 1.0] {
            assert!(sq.min_slack(&(b + Point::new(t, 0.0))) < c);
        }
    }

    #[test]
    fn cone_chords_near_apex_exit() {
        let mut g = rng();
        for beta in [0.5 * PI, PI, 1.5 * PI, 2.0 * PI] {
            let cone = ConeSurface::new(beta).unwrap();
            let rep = cone_quasigeodesic_exit_check(&cone, 0.01, 1000, &mut g).unwrap();
            assert!(rep.failures.is_empty() && rep.worst_slack <= 1e-12, "{beta}: {rep:?}");
        }
    }

    #[test]
    fn flat_angle_examples() {
        let r = rect(2.0, 1.0).unwrap();
        let mut g = rng();
        let rep = interior_flat_angle_check(&r, &Point::new(0.5, 0.0), 200, &mut g).unwrap();
        assert!(rep.worst_slack <= 1e-12, "{rep:?}");
        let st = stadium41a(128).unwrap();
        let rep = interior_flat_angle_check(&st, &Point::new(1.3, 0.0), 500, &mut g).unwrap();
        assert!(rep.worst_slack <= 1e-9 && rep.failures.is_empty(), "{rep:?}");
        assert!(matches!(
            interior_flat_angle_check(&r, &Point::new(1.0, 0.0), 10, &mut g),
            Err(GeomError::Precondition(_))
        ));
        let sq = rect(1.0, 1.0).unwrap();
        assert!(interior_flat_angle_check(&sq, &Point::zeros(), 10, &mut g).is_err());
    }

    #[test]
    fn second_difference_bounded() {
        let mut g = rng();
        for beta in [0.5 * PI, PI, 1.9 * PI, 2.0 * PI] {
            let cone = ConeSurface::new(beta).unwrap();
            let rep = second_difference_check(&cone, 1000, &mut g).unwrap();
            assert!(rep.failures.is_empty(), "{beta}: {rep:?}");
        }
        // On the plane the quotient is exactly 1 up to rounding.
        let rep = second_difference_check(&ConeSurface::plane(), 500, &mut g).unwrap();
        assert!(rep.worst_slack.abs() < 1e-6);
    }

    #[test]
    fn triangle_and_ball() {
        let mut g = rng();
        let cone = ConeSurface::new(0.7 * PI).unwrap();
        let rep = cone_triangle_inequality_check(&cone, 20_000, &mut g);
        assert!(rep.failures.is_empty() && rep.worst_slack <= 1e-9);
        let rep = cone_ball_convexity_check(&cone, 1.0, 2000, &mut g).unwrap();
        assert!(rep.failures.is_empty());
    }
}
