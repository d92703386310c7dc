//! Angular excess `θ_{p,u}(r)` and the Alexander–Bishop length excess.
//!
//! For a convex body and `p` in it, the ray from `p` in direction `ω` meets the body in
//! a segment `[p, p + ρ(ω)e_ω]`, so some `x` with `|x − p| >= r` lies in direction `ω`
//! iff `p + r·e_ω` is in the body. Each facet `i` with slack `g_i < r` therefore forbids
//! the open arc `|ω − ν_i| < arccos(g_i / r)` around its normal angle, and the infimum
//! is attained at an endpoint of one of these arcs. This is exact; no sampling is used.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::HalfplaneBody;
use crate::geom::wrap_pi;
use crate::{GeomError, Point, Result, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessProfile {
    pub radii: Vec<f64>,
    pub theta_values: Vec<f64>,
    /// Least-squares slope through the origin on the smallest third of the radii.
    pub fitted_slope: f64,
}

/// Relative tolerance for the at-least-normal test `u·(v − p) <= tol·|v − p|`.
const NORMAL_TOL: f64 = 1e-9;

/// `inf{∠(u, x − p) : x ∈ body, |x − p| >= r} − π/2`.
pub fn angular_excess(body: &HalfplaneBody, p: &Point, u: &Vector, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeomError::domain(format!("radius must be positive, got {r}")));
    }
    if r >= body.diameter() {
        return Err(GeomError::EmptyRegion(format!("r = {r} is not below the diameter {}", body.diameter())));
    }
    let un = u.norm();
    if !(un > 0.0) || !un.is_finite() {
        return Err(GeomError::domain("direction u must be nonzero"));
    }
    let u = u / un;
    let on_boundary_tol = 1e-7 * (1.0 + body.diameter());
    if body.boundary_distance(p).abs() > on_boundary_tol {
        return Err(GeomError::precondition(format!(
            "p = ({}, {}) is not on the boundary (distance {})",
            p.x,
            p.y,
            body.boundary_distance(p)
        )));
    }
    for v in body.vertices() {
        let w = v - p;
        let len = w.norm();
        if len > on_boundary_tol && u.dot(&w) > NORMAL_TOL * len {
            return Err(GeomError::precondition(format!(
                "u = ({}, {}) is not at least normal at p: it makes an acute angle with a vertex direction",
                u.x, u.y
            )));
        }
    }

    // Forbidden open arcs (center, half-width).
    let arcs: Vec<(f64, f64)> = (0..body.len())
        .filter_map(|i| {
            let g = body.slack(i, p).max(0.0);
            (g < r).then(|| {
                let n = body.normal(i);
                (n.y.atan2(n.x), (g / r).acos())
            })
        })
        .collect();
    let target = u.y.atan2(u.x);
    let inside = |w: f64, skip: usize| {
        arcs.iter().enumerate().any(|(j, &(c, a))| j != skip && wrap_pi(w - c).abs() < a - 1e-13)
    };
    if !inside(target, usize::MAX) {
        // Only reachable when u points into the body, which the precondition excludes.
        return Ok(-FRAC_PI_2);
    }
    let mut best = f64::INFINITY;
    for (i, &(c, a)) in arcs.iter().enumerate() {
        for end in [c - a, c + a] {
            if !inside(end, i) {
                best = best.min(wrap_pi(end - target).abs());
            }
        }
    }
    if !best.is_finite() {
        return Err(GeomError::EmptyRegion(format!("no point of the body lies at distance >= {r} from p")));
    }
    Ok(best - FRAC_PI_2)
}

/// Samples `θ` at `n` geometrically spaced radii in `[r_min, r_max]` and fits `θ ≈ a·r`.
pub fn excess_slope(
    body: &HalfplaneBody,
    p: &Point,
    u: &Vector,
    r_min: f64,
    r_max: f64,
    n: usize,
) -> Result<ExcessProfile> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(GeomError::domain("need 0 < r_min < r_max"));
    }
    if n < 3 {
        return Err(GeomError::domain("need at least three radii"));
    }
    let ratio = (r_max / r_min).powf(1.0 / (n - 1) as f64);
    let radii: Vec<f64> = (0..n).map(|k| if k + 1 == n { r_max } else { r_min * ratio.powi(k as i32) }).collect();
    let theta_values = radii.iter().map(|&r| angular_excess(body, p, u, r)).collect::<Result<Vec<_>>>()?;
    let window = (n / 3).max(2);
    let (num, den) = radii[..window]
        .iter()
        .zip(&theta_values[..window])
        .fold((0.0, 0.0), |(num, den), (r, t)| (num + r * t, den + r * r));
    Ok(ExcessProfile { radii, theta_values, fitted_slope: num / den })
}

/// Length excess of `ψ(t) = (t, λt²/2)` over `[−ρ, ρ]` against its chord, together
/// with the endpoint angular excess, for comparing the two notions of extrinsic curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlexanderBishop {
    pub lambda: f64,
    pub rho: f64,
    /// `∫ √(1 + λ²t²) dt − 2ρ` by adaptive Simpson quadrature.
    pub length_excess: f64,
    /// Leading term `λ²ρ³/3` of the series expansion.
    pub leading_term: f64,
    /// `length_excess / leading_term`.
    pub leading_ratio: f64,
    /// The constant `2/3` as printed in the source text, times `λ²ρ³`, for reference.
    pub printed_constant_term: f64,
    /// `arctan(λρ) − arctan(λρ/2)`: tangent at `ψ(ρ)` against the chord from `ψ(0)`.
    pub angular_excess_estimate: f64,
    /// `angular_excess_estimate / (λρ)`, which tends to `1/2`.
    pub angular_ratio: f64,
}

pub fn alexander_bishop_excess(lambda: f64, rho: f64) -> Result<AlexanderBishop> {
    if !(lambda >= 0.0 && rho > 0.0) || !(lambda * rho < 1.0) {
        return Err(GeomError::domain(format!("need lambda >= 0, rho > 0, lambda·rho < 1 (got {lambda}, {rho})")));
    }
    let leading = lambda * lambda * rho.powi(3) / 3.0;
    let (length_excess, angle) = if lambda == 0.0 {
        (0.0, 0.0)
    } else {
        // √(1+x²) − 1 written without cancellation.
        let f = |t: f64| {
            let q = lambda * lambda * t * t;
            q / ((1.0 + q).sqrt() + 1.0)
        };
        // The integrand is even.
        let half = adaptive_simpson(&f, 0.0, rho, 1e-13 * leading, 60)?;
        (2.0 * half, (lambda * rho).atan() - (0.5 * lambda * rho).atan())
    };
    let ratio = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    Ok(AlexanderBishop {
        lambda,
        rho,
        length_excess,
        leading_term: leading,
        leading_ratio: ratio(length_excess, leading),
        printed_constant_term: 2.0 * leading,
        angular_excess_estimate: angle,
        angular_ratio: ratio(angle, lambda * rho),
    })
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(GeomError::Numeric("adaptive quadrature did not converge".into()));
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let tol = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)
}
