use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soulgeom::cone::{triangle_angles, ConePoint, ConeSurface};
use soulgeom::convex_domain::generators::random_tangent_polygon;
use soulgeom::convex_domain::{angular_excess, soul, Erosion, HalfplaneBody};
use soulgeom::model_trig::{comparison_angle, hinge_distance, Curvature, ModelTriangle};
use soulgeom::{Point, Vector};

fn polygon(seed: u64, k: usize) -> HalfplaneBody {
    random_tangent_polygon(&mut ChaCha8Rng::seed_from_u64(seed), k).unwrap()
}

/// Symmetric Hausdorff distance between vertex sets, adequate for convex polygons
/// whose vertex lists should coincide.
fn vertex_gap(a: &HalfplaneBody, b: &HalfplaneBody) -> f64 {
    let one = |x: &HalfplaneBody, y: &HalfplaneBody| {
        x.vertices()
            .iter()
            .map(|p| y.vertices().iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn erode(body: &HalfplaneBody, s: f64) -> Option<HalfplaneBody> {
    match body.inner_parallel(s).unwrap() {
        Erosion::Body(b) => Some(b),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erosion_is_a_semigroup(seed in any::<u64>(), k in 4usize..12, f1 in 0.0f64..0.45, f2 in 0.0f64..0.45) {
        let body = polygon(seed, k);
        let (s1, s2) = (f1 * body.inradius(), f2 * body.inradius());
        let twice = erode(&erode(&body, s1).unwrap(), s2).unwrap();
        let once = erode(&body, s1 + s2).unwrap();
        prop_assert!(vertex_gap(&twice, &once) <= 1e-9, "gap {}", vertex_gap(&twice, &once));
        prop_assert!((twice.inradius() - (body.inradius() - s1 - s2)).abs() <= 1e-9);
    }

    #[test]
    fn eroded_bodies_are_nested(seed in any::<u64>(), f1 in 0.0f64..0.9, f2 in 0.0f64..0.9) {
        let body = polygon(seed, 9);
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let inner = erode(&body, hi * body.inradius()).unwrap();
        let outer = erode(&body, lo * body.inradius()).unwrap();
        for v in inner.vertices() {
            prop_assert!(outer.contains(v, 1e-9));
        }
    }

    #[test]
    fn soul_follows_similarities(seed in any::<u64>(), k in 3usize..10, angle in -PI..PI,
                                 dx in -5.0f64..5.0, dy in -5.0f64..5.0, scale in 0.2f64..5.0) {
        let body = polygon(seed, k);
        let moved = body.transformed(angle, Vector::new(dx, dy), scale).unwrap();
        let map = |p: &Point| {
            let (c, s) = (angle.cos(), angle.sin());
            Point::new(scale * (c * p.x - s * p.y) + dx, scale * (s * p.x + c * p.y) + dy)
        };
        let a = soul(&body).unwrap().soul;
        let b = soul(&moved).unwrap().soul;
        prop_assert!((map(&a) - b).norm() <= 1e-7 * (1.0 + scale), "{:?} vs {:?}", map(&a), b);
        prop_assert!((moved.inradius() - scale * body.inradius()).abs() <= 1e-9 * scale);
    }

    #[test]
    fn excess_is_monotone_at_vertices(seed in any::<u64>(), k in 3usize..10, which in 0usize..10) {
        let body = polygon(seed, k);
        let v = body.vertices();
        let n = v.len();
        let i = which % n;
        // The bisector of the two facet normals at a vertex is at least normal there.
        let (a, b) = ((v[i] - v[(i + n - 1) % n]).normalize(), (v[(i + 1) % n] - v[i]).normalize());
        let u = Vector::new(a.y + b.y, -a.x - b.x).normalize();
        let reach = v.iter().map(|w| (w - v[i]).norm()).fold(0.0, f64::max);
        let mut last = f64::NEG_INFINITY;
        for j in 1..=12 {
            let r = reach * j as f64 / 13.0;
            let theta = angular_excess(&body, &v[i], &u, r).unwrap();
            prop_assert!(theta >= -1e-12);
            prop_assert!(theta >= last - 1e-12);
            last = theta;
        }
    }

    #[test]
    fn cone_metric_is_symmetric_and_rotation_invariant(beta in 0.3f64..TAU, r1 in 0.0f64..3.0, r2 in 0.0f64..3.0,
                                                       t1 in 0.0f64..1.0, t2 in 0.0f64..1.0, shift in 0.0f64..1.0) {
        let cone = ConeSurface::new(beta).unwrap();
        let p = cone.point(r1, t1 * beta).unwrap();
        let q = cone.point(r2, t2 * beta).unwrap();
        let d = cone.distance(&p, &q);
        prop_assert_eq!(d, cone.distance(&q, &p));
        let ps = cone.point(r1, t1 * beta + shift * beta).unwrap();
        let qs = cone.point(r2, t2 * beta + shift * beta).unwrap();
        prop_assert!((cone.distance(&ps, &qs) - d).abs() <= 1e-9 * (1.0 + d));
        prop_assert!(d <= r1 + r2 + 1e-12 && d >= (r1 - r2).abs() - 1e-12);
    }

    #[test]
    fn cone_triangles_are_fatter_than_flat(beta in 0.3f64..TAU, pts in prop::array::uniform3((0.05f64..3.0, 0.0f64..1.0))) {
        let cone = ConeSurface::new(beta).unwrap();
        let [a, b, c] = pts.map(|(r, t)| ConePoint { r, theta: t * beta });
        let sides = [cone.distance(&b, &c), cone.distance(&a, &c), cone.distance(&a, &b)];
        prop_assume!(sides.iter().all(|&s| s > 1e-3));
        prop_assume!(sides[0] < sides[1] + sides[2] - 1e-6 && sides[1] < sides[0] + sides[2] - 1e-6
            && sides[2] < sides[0] + sides[1] - 1e-6);
        let realized = triangle_angles(&cone, &a, &b, &c).unwrap();
        let model = ModelTriangle::new(sides[0], sides[1], sides[2], Curvature::Flat).unwrap().angles().unwrap();
        prop_assert!(realized.iter().sum::<f64>() >= model.iter().sum::<f64>() - 1e-9);
    }

    #[test]
    fn busemann_is_one_lipschitz(beta in 0.3f64..TAU, ray in 0.0f64..1.0,
                                 r1 in 0.0f64..3.0, r2 in 0.0f64..3.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let cone = ConeSurface::new(beta).unwrap();
        let p = ConePoint { r: r1, theta: t1 * beta };
        let q = ConePoint { r: r2, theta: t2 * beta };
        let gap = (cone.busemann(ray * beta, &p) - cone.busemann(ray * beta, &q)).abs();
        prop_assert!(gap <= cone.distance(&p, &q) + 1e-12);
    }

    #[test]
    fn hinge_and_comparison_angle_invert(b in 0.01f64..1.5, c in 0.01f64..1.5, alpha in 0.01f64..(PI - 0.01), sphere in any::<bool>()) {
        let k = if sphere { Curvature::Sphere } else { Curvature::Flat };
        let a = hinge_distance(b, c, alpha, k).unwrap();
        prop_assume!(a > 1e-6);
        let back = comparison_angle(a, b, c, k).unwrap();
        prop_assert!((back - alpha).abs() <= 1e-6, "{back} vs {alpha}");
    }

    #[test]
    fn spherical_hinges_are_shorter(b in 0.01f64..1.5, c in 0.01f64..1.5, alpha in 0.0f64..PI) {
        let flat = hinge_distance(b, c, alpha, Curvature::Flat).unwrap();
        let round = hinge_distance(b, c, alpha, Curvature::Sphere).unwrap();
        prop_assert!(round <= flat + 1e-12);
    }
}
