//! Built-in bodies and the generator grammar
//! `rect(a,b) | ngon(k,R) | disk(R,n) | stadium41a[(n)] | parabola(lambda,L[,n]) | poly(x1,y1,...)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use super::{Halfplane, HalfplaneBody};
use crate::geom::from_angle;
use crate::{GeomError, Point, Result, Vector};

/// Default number of supporting halfplanes per smooth arc.
pub const DEFAULT_ARC_HALFPLANES: usize = 128;
/// Default number of tangent lines for `parabola(lambda, L)`.
pub const DEFAULT_PARABOLA_TANGENTS: usize = 2001;

fn hp(nx: f64, ny: f64, c: f64) -> Result<Halfplane> {
    Halfplane::new(Vector::new(nx, ny), c)
}

/// The rectangle `[-a, a] × [-b, b]`.
pub fn rect(a: f64, b: f64) -> Result<HalfplaneBody> {
    if !(a > 0.0 && b > 0.0) {
        return Err(GeomError::domain("rect half-widths must be positive"));
    }
    HalfplaneBody::new(
        format!("rect({a},{b})"),
        vec![hp(1.0, 0.0, a)?, hp(0.0, 1.0, b)?, hp(-1.0, 0.0, a)?, hp(0.0, -1.0, b)?],
    )
}

/// Regular `k`-gon with circumradius `r` and a vertex at `(r, 0)`.
pub fn ngon(k: usize, r: f64) -> Result<HalfplaneBody> {
    regular(format!("ngon({k},{r})"), k, r)
}

/// The disk of radius `r` approximated by an inscribed regular `n`-gon (vertex at `(r, 0)`).
pub fn disk(r: f64, n: usize) -> Result<HalfplaneBody> {
    regular(format!("disk({r},{n})"), n, r)
}

fn regular(label: String, k: usize, r: f64) -> Result<HalfplaneBody> {
    if k < 3 || !(r > 0.0) {
        return Err(GeomError::domain("regular polygon needs k >= 3 and a positive radius"));
    }
    let apothem = r * (PI / k as f64).cos();
    let planes = (0..k)
        .map(|j| {
            let phi = (2 * j + 1) as f64 * PI / k as f64;
            Halfplane::new(from_angle(phi), apothem)
        })
        .collect::<Result<Vec<_>>>()?;
    HalfplaneBody::new(label, planes)
}

/// Convex polygon from counterclockwise vertices.
pub fn polygon_from_vertices(label: &str, vertices: &[Point]) -> Result<HalfplaneBody> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeomError::domain("polygon needs at least three vertices"));
    }
    let planes = (0..n)
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % n]);
            let e = b - a;
            let normal = Vector::new(e.y, -e.x);
            Halfplane::new(normal, normal.dot(&a))
        })
        .collect::<Result<Vec<_>>>()?;
    let body = HalfplaneBody::new(label, planes)?;
    if body.vertices().len() != n {
        return Err(GeomError::InvalidBody("vertices are not in convex counterclockwise position".into()));
    }
    Ok(body)
}

/// The stadium `{|x1| <= 4, |x2| <= 1} ∪ {(x1 ∓ 4)²/4 + x2² <= 1}`, with each elliptical
/// cap supported by `per_cap + 1` tangent lines (the two at the junctions coincide
/// with `|x2| <= 1`), so the body has `2·per_cap` halfplanes.
///
/// Tangent points sit at parameters `φ = (π/2)·sin τ` for uniform `τ`, which clusters
/// them near the cap/rectangle junction where the ends of the maximum segment are
/// decided. An even `per_cap` puts a tangent at the cap tip `(±6, 0)`.
pub fn stadium41a(per_cap: usize) -> Result<HalfplaneBody> {
    if per_cap < 2 {
        return Err(GeomError::domain("stadium needs at least two halfplanes per cap"));
    }
    let mut planes = vec![hp(0.0, 1.0, 1.0)?, hp(0.0, -1.0, 1.0)?];
    for k in 0..=per_cap {
        let tau = -FRAC_PI_2 + PI * k as f64 / per_cap as f64;
        let phi = FRAC_PI_2 * tau.sin();
        // Point (4 + 2cos φ, sin φ); gradient of (x-4)²/4 + y² there is (cos φ, 2 sin φ).
        let (s, c) = phi.sin_cos();
        let point = Point::new(4.0 + 2.0 * c, s);
        let normal = Vector::new(c, 2.0 * s).normalize();
        let offset = normal.dot(&point);
        planes.push(Halfplane { normal, offset });
        planes.push(Halfplane { normal: Vector::new(-normal.x, normal.y), offset });
    }
    HalfplaneBody::new(format!("stadium41a({per_cap})"), planes)
}

/// The parabolic domain `{x2 <= -lambda·x1²}` cut off by tangents at `|x1| <= L`
/// and the line `x2 >= -(lambda·L² + L)`. Uses `n` (odd) tangent lines so that the
/// apex tangent `x2 <= 0` is included.
pub fn parabola(lambda: f64, half_width: f64, n: usize) -> Result<HalfplaneBody> {
    if !(lambda > 0.0 && half_width > 0.0) || n < 3 {
        return Err(GeomError::domain("parabola needs lambda > 0, L > 0 and at least three tangents"));
    }
    let n = if n % 2 == 0 { n + 1 } else { n };
    let mut planes = Vec::with_capacity(n + 1);
    let mid = (n / 2) as f64;
    for k in 0..n {
        let t = half_width * (k as f64 - mid) / mid;
        // Tangent at (t, -λt²): outward normal ∝ (2λt, 1).
        let normal = Vector::new(2.0 * lambda * t, 1.0);
        let point = Point::new(t, -lambda * t * t);
        planes.push(Halfplane::new(normal, normal.dot(&point))?);
    }
    planes.push(hp(0.0, -1.0, lambda * half_width * half_width + half_width)?);
    HalfplaneBody::new(format!("parabola({lambda},{half_width})"), planes)
}

/// A random `k`-gon circumscribed about a random ellipse: every facet touches the
/// ellipse, so none is redundant.
pub fn random_tangent_polygon<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Result<HalfplaneBody> {
    if k < 3 {
        return Err(GeomError::domain("need k >= 3"));
    }
    let a = rng.gen_range(1.0..3.0);
    let b = rng.gen_range(0.8..2.0);
    let rot = rng.gen_range(0.0..TAU);
    let center = Vector::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let phase = rng.gen_range(0.0..TAU);
    let planes = (0..k)
        .map(|j| {
            let jitter = rng.gen_range(-0.3..0.3);
            let phi = phase + (j as f64 + jitter) * TAU / k as f64;
            let n = from_angle(phi);
            // Support function of the rotated ellipse in direction n.
            let local = crate::geom::rotate(&n, -rot);
            let h = ((a * local.x).powi(2) + (b * local.y).powi(2)).sqrt();
            Halfplane::new(n, h + n.dot(&center))
        })
        .collect::<Result<Vec<_>>>()?;
    HalfplaneBody::new(format!("tangent{k}"), planes)
}

/// Parses a generator expression such as `rect(2,1)` or `stadium41a`.
pub fn parse_generator(spec: &str) -> Result<HalfplaneBody> {
    let spec = spec.trim();
    let (name, args) = match spec.find('(') {
        Some(open) => {
            if !spec.ends_with(')') {
                return Err(GeomError::Parse(format!("unbalanced parentheses in '{spec}'")));
            }
            let inner = &spec[open + 1..spec.len() - 1];
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|_| GeomError::Parse(format!("bad number '{a}'"))))
                    .collect::<Result<Vec<_>>>()?
            };
            (&spec[..open], args)
        }
        None => (spec, Vec::new()),
    };
    let count = |x: f64| -> Result<usize> {
        if x.fract() != 0.0 || x < 0.0 {
            return Err(GeomError::Parse(format!("expected a count, got {x}")));
        }
        Ok(x as usize)
    };
    let arity = |n: &[usize]| -> Result<()> {
        if n.contains(&args.len()) {
            Ok(())
        } else {
            Err(GeomError::Parse(format!("{name} takes {n:?} arguments, got {}", args.len())))
        }
    };
    match name.trim() {
        "rect" => {
            arity(&[2])?;
            rect(args[0], args[1])
        }
        "ngon" => {
            arity(&[2])?;
            ngon(count(args[0])?, args[1])
        }
        "disk" => {
            arity(&[1, 2])?;
            let n = if args.len() == 2 { count(args[1])? } else { 256 };
            disk(args[0], n)
        }
        "stadium41a" => {
            arity(&[0, 1])?;
            let n = if args.len() == 1 { count(args[0])? } else { DEFAULT_ARC_HALFPLANES };
            stadium41a(n)
        }
        "parabola" => {
            arity(&[2, 3])?;
            let n = if args.len() == 3 { count(args[2])? } else { DEFAULT_PARABOLA_TANGENTS };
            parabola(args[0], args[1], n)
        }
        "poly" => {
            if args.len() < 6 || args.len() % 2 != 0 {
                return Err(GeomError::Parse("poly needs at least three (x, y) pairs".into()));
            }
            let pts: Vec<Point> = args.chunks(2).map(|c| Point::new(c[0], c[1])).collect();
            polygon_from_vertices(spec, &pts)
        }
        other => Err(GeomError::Parse(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_grammar() {
        assert_eq!(parse_generator("rect(2,1)").unwrap().len(), 4);
        assert_eq!(parse_generator("ngon(6, 1)").unwrap().vertices().len(), 6);
        assert_eq!(parse_generator("disk(2)").unwrap().len(), 256);
        assert_eq!(parse_generator("stadium41a").unwrap().len(), 2 * 128);
        assert!(parse_generator("parabola(1,1,201)").is_ok());
        assert!(parse_generator("poly(0,0,4,0,0,3)").is_ok());
        assert!(matches!(parse_generator("blob(1)"), Err(GeomError::Parse(_))));
        assert!(matches!(parse_generator("rect(1"), Err(GeomError::Parse(_))));
        assert!(matches!(parse_generator("rect(1,x)"), Err(GeomError::Parse(_))));
        assert!(matches!(parse_generator("ngon(2.5,1)"), Err(GeomError::Parse(_))));
    }

    #[test]
    fn stadium_is_symmetric_and_bounded_by_unit_strip() {
        let s = stadium41a(128).unwrap();
        let xs: Vec<f64> = s.vertices().iter().map(|p| p.x).collect();
        let ys: Vec<f64> = s.vertices().iter().map(|p| p.y).collect();
        assert!(xs.iter().cloned().fold(f64::MIN, f64::max) > 6.0 - 1e-9);
        assert!(ys.iter().all(|y| y.abs() <= 1.0 + 1e-12));
        let m = s.boundary_distance(&Point::new(6.0, 0.0));
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parabola_contains_apex_on_boundary() {
        let p = parabola(1.0, 1.0, 201).unwrap();
        assert_abs_diff_eq!(p.boundary_distance(&Point::new(0.0, 0.0)), 0.0, epsilon = 1e-15);
        assert!(p.boundary_distance(&Point::new(0.0, -0.5)) > 0.0);
    }

    #[test]
    fn random_tangent_polygons_have_all_facets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let b = random_tangent_polygon(&mut rng, 12).unwrap();
            assert_eq!(b.vertices().len(), 12);
        }
    }

    #[test]
    fn polygon_rejects_clockwise() {
        let cw = [Point::new(0.0, 0.0), Point::new(0.0, 3.0), Point::new(4.0, 0.0)];
        assert!(polygon_from_vertices("cw", &cw).is_err());
    }
}
