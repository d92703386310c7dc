//! Law-of-cosines trigonometry in the model planes of curvature 0 and 1.
//!
//! Every comparison statement in the crate reduces to these two planes. Cosine
//! arguments are clamped to `[-1, 1]` before `acos`, so degenerate (collinear)
//! triangles evaluate to `0` or `π` instead of `NaN`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{GeomError, Result};

/// Absolute tolerance for angle comparisons. All model computations are closed
/// form, so only rounding error needs absorbing.
pub const ANGLE_TOL: f64 = 1e-9;

const SIDE_TOL: f64 = 1e-12;

/// Curvature of a model plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curvature {
    /// The Euclidean plane, `k = 0`.
    Flat,
    /// The unit sphere, `k = 1`.
    Sphere,
}

impl Curvature {
    pub fn k(self) -> f64 {
        match self {
            Curvature::Flat => 0.0,
            Curvature::Sphere => 1.0,
        }
    }

    pub fn from_k(k: f64) -> Result<Self> {
        if k == 0.0 {
            Ok(Curvature::Flat)
        } else if k == 1.0 {
            Ok(Curvature::Sphere)
        } else {
            Err(GeomError::domain(format!("model curvature must be 0 or 1, got {k}")))
        }
    }
}

/// A triangle in a model plane, given by its three side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTriangle {
    pub side_a: f64,
    pub side_b: f64,
    pub side_c: f64,
    pub curvature: Curvature,
}

impl ModelTriangle {
    pub fn new(side_a: f64, side_b: f64, side_c: f64, curvature: Curvature) -> Result<Self> {
        check_sides(side_a, side_b, side_c, curvature)?;
        Ok(Self { side_a, side_b, side_c, curvature })
    }

    /// Angles opposite `side_a`, `side_b`, `side_c`.
    pub fn angles(&self) -> Result<[f64; 3]> {
        let (a, b, c, k) = (self.side_a, self.side_b, self.side_c, self.curvature);
        Ok([
            comparison_angle(a, b, c, k)?,
            comparison_angle(b, c, a, k)?,
            comparison_angle(c, a, b, k)?,
        ])
    }
}

fn check_sides(a: f64, b: f64, c: f64, k: Curvature) -> Result<()> {
    for (name, s) in [("a", a), ("b", b), ("c", c)] {
        if !s.is_finite() || s < 0.0 {
            return Err(GeomError::domain(format!("side {name} = {s} is not a nonnegative length")));
        }
    }
    let scale = SIDE_TOL * (1.0 + a + b + c);
    if a > b + c + scale || b > a + c + scale || c > a + b + scale {
        return Err(GeomError::domain(format!(
            "sides ({a}, {b}, {c}) violate the triangle inequality"
        )));
    }
    if k == Curvature::Sphere {
        if a.max(b).max(c) > PI + SIDE_TOL {
            return Err(GeomError::domain("spherical side longer than π"));
        }
        if a + b + c > 2.0 * PI + scale {
            return Err(GeomError::domain("spherical perimeter exceeds 2π"));
        }
    }
    Ok(())
}

fn clamp_cos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Angle opposite side `a` in the model triangle with sides `a`, `b`, `c`.
pub fn comparison_angle(a: f64, b: f64, c: f64, k: Curvature) -> Result<f64> {
    check_sides(a, b, c, k)?;
    if b == 0.0 || c == 0.0 {
        return Err(GeomError::Degenerate("comparison angle needs nonzero adjacent sides".into()));
    }
    let cos_alpha = match k {
        Curvature::Flat => (b * b + c * c - a * a) / (2.0 * b * c),
        Curvature::Sphere => {
            let denom = b.sin() * c.sin();
            if denom.abs() < SIDE_TOL {
                return Err(GeomError::Degenerate(
                    "adjacent side of length π has no well-defined hinge angle".into(),
                ));
            }
            (a.cos() - b.cos() * c.cos()) / denom
        }
    };
    Ok(clamp_cos(cos_alpha).acos())
}

/// Length of the side opposite a hinge with legs `b`, `c` and angle `alpha`.
pub fn hinge_distance(b: f64, c: f64, alpha: f64, k: Curvature) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(GeomError::domain(format!("hinge angle {alpha} outside [0, π]")));
    }
    if !(b.is_finite() && c.is_finite()) || b < 0.0 || c < 0.0 {
        return Err(GeomError::domain("hinge legs must be nonnegative lengths"));
    }
    match k {
        Curvature::Flat => Ok((b * b + c * c - 2.0 * b * c * alpha.cos()).max(0.0).sqrt()),
        Curvature::Sphere => {
            if b > PI || c > PI {
                return Err(GeomError::domain("spherical hinge legs must not exceed π"));
            }
            let cos_a = b.cos() * c.cos() + b.sin() * c.sin() * alpha.cos();
            Ok(clamp_cos(cos_a).acos())
        }
    }
}

/// Per-vertex margins `realized - comparison`; `realized[i]` is the angle opposite `sides[i]`.
pub fn fatness_margins(realized: [f64; 3], sides: [f64; 3], k: Curvature) -> Result<[f64; 3]> {
    let tri = ModelTriangle::new(sides[0], sides[1], sides[2], k)?;
    let model = tri.angles()?;
    Ok([realized[0] - model[0], realized[1] - model[1], realized[2] - model[2]])
}

/// True iff every realized angle is at least its comparison angle, within [`ANGLE_TOL`].
pub fn is_fatter(realized: [f64; 3], sides: [f64; 3], k: Curvature) -> Result<bool> {
    Ok(fatness_margins(realized, sides, k)?.iter().all(|m| *m >= -ANGLE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn equilateral_flat() {
        let a = comparison_angle(1.0, 1.0, 1.0, Curvature::Flat).unwrap();
        assert_abs_diff_eq!(a, PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn spherical_octant() {
        let a = comparison_angle(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, Curvature::Sphere).unwrap();
        assert_abs_diff_eq!(a, FRAC_PI_2, epsilon = 1e-12);
    }

    /// Places the triangle in the plane by minimizing the mismatch of the third
    /// side over the hinge angle, then reads the angle off the embedding.
    fn brute_force_planar_angle(a: f64, b: f64, c: f64) -> f64 {
        let n = 200_000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let alpha = PI * i as f64 / n as f64;
            let p = (b * alpha.cos(), b * alpha.sin());
            let q = (c, 0.0);
            let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
            let err = (d - a).abs();
            if err < best.0 {
                best = (err, alpha);
            }
        }
        best.1
    }

    #[test]
    fn generic_planar_angle_matches_embedding() {
        let got = comparison_angle(1.0, 0.8, 0.9, Curvature::Flat).unwrap();
        let closed = ((0.8f64 * 0.8 + 0.9 * 0.9 - 1.0) / (2.0 * 0.8 * 0.9)).acos();
        assert_abs_diff_eq!(got, closed, epsilon = 1e-14);
        assert_abs_diff_eq!(got, brute_force_planar_angle(1.0, 0.8, 0.9), epsilon = 2e-5);
    }

    #[test]
    fn hinge_examples() {
        assert_eq!(hinge_distance(1.0, 1.0, 0.0, Curvature::Flat).unwrap(), 0.0);
        assert_abs_diff_eq!(hinge_distance(3.0, 4.0, FRAC_PI_2, Curvature::Flat).unwrap(), 5.0, epsilon = 1e-12);
        let s = hinge_distance(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, Curvature::Sphere).unwrap();
        assert_abs_diff_eq!(s, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn spherical_hinge_matches_great_circle_sampling() {
        // Two unit vectors at arc length b and c from a common pole, separated by alpha
        // in longitude; their great-circle distance is the hinge side.
        let (b, c, alpha) = (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        let pole = [0.0, 0.0, 1.0];
        let x = [b.sin(), 0.0, b.cos()];
        let y = [c.sin() * alpha.cos(), c.sin() * alpha.sin(), c.cos()];
        let _ = pole;
        // Sample the great-circle arc from x to y and sum chord lengths.
        let n = 10_000;
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let omega = dot.clamp(-1.0, 1.0).acos();
        let mut length = 0.0;
        let mut prev = x;
        for i in 1..=n {
            let t = omega * i as f64 / n as f64;
            let (s0, s1) = (((omega - t).sin()) / omega.sin(), t.sin() / omega.sin());
            let p = [s0 * x[0] + s1 * y[0], s0 * x[1] + s1 * y[1], s0 * x[2] + s1 * y[2]];
            length += ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2) + (p[2] - prev[2]).powi(2)).sqrt();
            prev = p;
        }
        let got = hinge_distance(b, c, alpha, Curvature::Sphere).unwrap();
        assert_abs_diff_eq!(got, length, epsilon = 1e-7);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(comparison_angle(3.0, 1.0, 1.0, Curvature::Flat), Err(GeomError::Domain(_))));
        assert!(matches!(comparison_angle(1.0, 0.0, 1.0, Curvature::Flat), Err(GeomError::Degenerate(_))));
        assert!(matches!(comparison_angle(3.0, 3.0, 3.0, Curvature::Sphere), Err(GeomError::Domain(_))));
        assert!(matches!(hinge_distance(1.0, 1.0, 4.0, Curvature::Flat), Err(GeomError::Domain(_))));
        assert!(Curvature::from_k(-1.0).is_err());
    }

    #[test]
    fn own_triangle_is_fat_with_equality() {
        let sides = [1.0, 0.8, 0.9];
        let tri = ModelTriangle::new(sides[0], sides[1], sides[2], Curvature::Flat).unwrap();
        let angles = tri.angles().unwrap();
        assert_abs_diff_eq!(angles.iter().sum::<f64>(), PI, epsilon = 1e-12);
        assert!(is_fatter(angles, sides, Curvature::Flat).unwrap());
        let m = fatness_margins(angles, sides, Curvature::Flat).unwrap();
        assert!(m.iter().all(|x| x.abs() < 1e-12));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn angle_monotone_in_opposite_side(b in 0.1f64..2.0, c in 0.1f64..2.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
                let (lo, hi) = ((b - c).abs(), b + c);
                let (u, v) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let a1 = lo + u * (hi - lo);
                let a2 = lo + v * (hi - lo);
                let x1 = comparison_angle(a1, b, c, Curvature::Flat).unwrap();
                let x2 = comparison_angle(a2, b, c, Curvature::Flat).unwrap();
                prop_assert!(x1 <= x2 + 1e-12);
            }

            #[test]
            fn hinge_roundtrip(b in 0.1f64..1.5, c in 0.1f64..1.5, alpha in 0.05f64..3.09, sphere in any::<bool>()) {
                let k = if sphere { Curvature::Sphere } else { Curvature::Flat };
                let a = hinge_distance(b, c, alpha, k).unwrap();
                let back = comparison_angle(a, b, c, k).unwrap();
                prop_assert!((back - alpha).abs() < 1e-10, "alpha {} back {}", alpha, back);
            }

            #[test]
            fn flat_hinge_law_of_cosines(b in 0.0f64..5.0, c in 0.0f64..5.0, alpha in 0.0f64..PI) {
                let d = hinge_distance(b, c, alpha, Curvature::Flat).unwrap();
                let rhs = b * b + c * c - 2.0 * b * c * alpha.cos();
                prop_assert!((d * d - rhs.max(0.0)).abs() < 1e-10 * (1.0 + b * c));
            }
        }
    }
}
