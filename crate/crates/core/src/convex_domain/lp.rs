//! Chebyshev-center linear program for a bounded halfplane intersection.
//!
//! The primal problem is `max t  s.t.  n_i·x + t <= c_i`. It has three unknowns, so
//! we run the simplex method on its dual
//!
//! ```text
//! min Σ c_i y_i   s.t.  Σ y_i n_i = 0,  Σ y_i = 1,  y >= 0
//! ```
//!
//! whose basis is a 3×3 matrix. The simplex multipliers of a dual basis are exactly
//! the primal point `(x, t)` on which the three basic constraints are tight, and the
//! reduced costs are the primal slacks.

use nalgebra::{Matrix3, Vector3};

use super::Halfplane;
use crate::geom::cross;
use crate::{GeomError, Point, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct ChebyshevCenter {
    pub center: Point,
    pub radius: f64,
}

const MAX_ITER: usize = 100_000;

pub(crate) fn chebyshev_center(planes: &[Halfplane]) -> Result<ChebyshevCenter> {
    let m = planes.len();
    if m < 3 {
        return Err(GeomError::InvalidBody("need at least three halfplanes".into()));
    }
    let scale = planes.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;

    let mut basis = initial_basis(planes)?;
    for _ in 0..MAX_ITER {
        let b = basis_matrix(planes, &basis);
        let Some(b_inv) = b.try_inverse() else {
            return Err(GeomError::Internal("singular simplex basis".into()));
        };
        // Multipliers solve Bᵀ π = c_B, i.e. n_i·x + t = c_i on the basis.
        let c_b = Vector3::new(planes[basis[0]].offset, planes[basis[1]].offset, planes[basis[2]].offset);
        let pi = b_inv.transpose() * c_b;
        let x = Point::new(pi[0], pi[1]);
        let t = pi[2];

        // Bland's rule: first index with negative reduced cost enters.
        let entering = (0..m).find(|&j| {
            !basis.contains(&j) && planes[j].offset - planes[j].normal.dot(&x) - t < -tol
        });
        let Some(j) = entering else {
            return Ok(ChebyshevCenter { center: x, radius: t });
        };

        let y_b = b_inv * Vector3::new(0.0, 0.0, 1.0);
        let col = Vector3::new(planes[j].normal.x, planes[j].normal.y, 1.0);
        let d = b_inv * col;
        let mut leave: Option<(usize, f64)> = None;
        for k in 0..3 {
            if d[k] > 1e-14 {
                let ratio = y_b[k].max(0.0) / d[k];
                let better = match leave {
                    None => true,
                    Some((kk, r)) => ratio < r - 1e-15 || (ratio <= r + 1e-15 && basis[k] < basis[kk]),
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
        }
        let Some((k, _)) = leave else {
            return Err(GeomError::Internal("Chebyshev LP is unbounded".into()));
        };
        basis[k] = j;
    }
    Err(GeomError::Internal("simplex iteration limit reached".into()))
}

fn basis_matrix(planes: &[Halfplane], basis: &[usize; 3]) -> Matrix3<f64> {
    let mut b = Matrix3::zeros();
    for (col, &i) in basis.iter().enumerate() {
        b[(0, col)] = planes[i].normal.x;
        b[(1, col)] = planes[i].normal.y;
        b[(2, col)] = 1.0;
    }
    b
}

/// Three normals whose convex hull contains the origin: a dual-feasible basis.
///
/// For a normal `n_a`, the two normals angularly closest to `-n_a` on either side
/// span a cone containing `-n_a`, so the origin lies in the triangle of the three.
fn initial_basis(planes: &[Halfplane]) -> Result<[usize; 3]> {
    for (a, ha) in planes.iter().enumerate() {
        let anti = -ha.normal;
        let mut cw: Option<(f64, usize)> = None;
        let mut ccw: Option<(f64, usize)> = None;
        for (j, hj) in planes.iter().enumerate() {
            if j == a {
                continue;
            }
            let phi = cross(&anti, &hj.normal).atan2(anti.dot(&hj.normal));
            if phi <= 0.0 && cw.is_none_or(|(best, _)| phi > best) {
                cw = Some((phi, j));
            }
            if phi > 0.0 && ccw.is_none_or(|(best, _)| phi < best) {
                ccw = Some((phi, j));
            }
        }
        let (Some((phi_b, b)), Some((phi_c, c))) = (cw, ccw) else { continue };
        if phi_c - phi_b >= std::f64::consts::PI {
            continue;
        }
        let basis = [a, b, c];
        if let Some(inv) = basis_matrix(planes, &basis).try_inverse() {
            let y = inv * Vector3::new(0.0, 0.0, 1.0);
            if y.iter().all(|v| *v >= -1e-12) {
                return Ok(basis);
            }
        }
    }
    Err(GeomError::InvalidBody("halfplane normals do not surround the origin (unbounded body)".into()))
}
