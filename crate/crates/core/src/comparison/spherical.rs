//! The spherical model of a strictly convex level set: a great circle through
//! `p* = (cos ε0, 0, sin ε0)` perpendicular to the meridian drops towards the equator.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::{GeomError, Result};

/// Distance from `ψ*(r)` to the equator `S¹`.
pub fn spherical_model_distance(eps0: f64, r: f64) -> Result<f64> {
    if !(eps0 > 0.0 && eps0 < FRAC_PI_2) {
        return Err(GeomError::domain(format!("ε0 = {eps0} outside (0, π/2)")));
    }
    if !(0.0..PI).contains(&r) {
        return Err(GeomError::domain(format!("r = {r} outside [0, π)")));
    }
    let (se, ce) = eps0.sin_cos();
    let (sr, cr) = r.sin_cos();
    Ok((se * cr / ((ce * cr).powi(2) + sr * sr).sqrt()).atan())
}

/// Largest `d*(ε0, r) − ε0·cos r` over an `n × n` grid of `ε0 ∈ (0, π/2)`, `r ∈ [0, π/2]`.
pub fn spherical_bound_violation(n: usize) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=n {
        let eps0 = FRAC_PI_2 * i as f64 / (n + 1) as f64;
        for j in 0..n {
            let r = FRAC_PI_2 * j as f64 / (n - 1).max(1) as f64;
            worst = worst.max(spherical_model_distance(eps0, r)? - eps0 * r.cos());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub eps0: f64,
    /// `θ̃(r)/r` at each grid radius.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Model excess `θ̃(r) = (ε0 − d*(r)) / (2r)`: the level drop along `ψ*` divided by the
/// chord length and halved, as in the derivation of the `ε0·r/8` lower bound.
pub fn model_excess(eps0: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::domain("r must be positive"));
    }
    Ok((eps0 - spherical_model_distance(eps0, r)?) / (2.0 * r))
}

/// Checks `θ̃(r)/r >= ε0/8` on `r_grid`.
pub fn strict_convexity_slope_check(eps0: f64, r_grid: &[f64]) -> Result<SlopeCheck> {
    if !(eps0 > 0.0 && eps0 <= 0.5) {
        return Err(GeomError::domain(format!("ε0 = {eps0} outside (0, 1/2]")));
    }
    let ratios = r_grid.iter().map(|&r| Ok(model_excess(eps0, r)? / r)).collect::<Result<Vec<_>>>()?;
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = eps0 / 8.0;
    Ok(SlopeCheck { eps0, min_ratio, bound, holds: min_ratio >= bound, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Oracle: geodesic distance to the equator of the explicit point on the sphere.
    fn embedded(eps0: f64, r: f64) -> f64 {
        let p = [eps0.cos() * r.cos(), r.sin(), eps0.sin() * r.cos()];
        let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        (p[2] / norm).asin()
    }

    #[test]
    fn closed_form_examples() {
        assert_abs_diff_eq!(spherical_model_distance(0.3, 0.0).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(spherical_model_distance(0.3, FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-15);
        let v = spherical_model_distance(0.2, 0.5).unwrap();
        assert!(v <= 0.2 * 0.5f64.cos());
        assert_abs_diff_eq!(0.2 * 0.5f64.cos(), 0.17552, epsilon = 1e-5);
        assert_abs_diff_eq!(v, embedded(0.2, 0.5), epsilon = 1e-14);
        assert!(spherical_model_distance(1.6, 0.1).is_err());
        assert!(spherical_model_distance(0.1, -0.1).is_err());
    }

    #[test]
    fn slope_examples() {
        let c = strict_convexity_slope_check(0.2, &[0.05]).unwrap();
        assert!(c.holds && c.min_ratio >= 0.025);
        let grid: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64).collect();
        let c = strict_convexity_slope_check(0.4, &grid).unwrap();
        assert!(c.min_ratio >= 0.05);
        let tiny = strict_convexity_slope_check(1e-6, &[0.05]).unwrap();
        assert!(tiny.min_ratio < 1e-6);
    }

    #[test]
    fn grid_bound() {
        assert!(spherical_bound_violation(100).unwrap() <= 1e-12);
    }

    proptest! {
        #[test]
        fn matches_embedding(eps0 in 0.01f64..1.5, r in 0.0f64..1.5) {
            prop_assert!((spherical_model_distance(eps0, r).unwrap() - embedded(eps0, r)).abs() < 1e-12);
        }
    }
}
