//! Maximum sets and the iterated soul construction.

use serde::{Deserialize, Serialize};

use super::HalfplaneBody;
use crate::{GeomError, Point, Result, Vector};

/// The set where the boundary distance attains the inradius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxSet {
    Point { at: Point, level: f64 },
    Segment { from: Point, to: Point, level: f64 },
}

impl MaxSet {
    pub fn dimension(&self) -> u8 {
        match self {
            MaxSet::Point { .. } => 0,
            MaxSet::Segment { .. } => 1,
        }
    }

    pub fn level(&self) -> f64 {
        match self {
            MaxSet::Point { level, .. } | MaxSet::Segment { level, .. } => *level,
        }
    }

    pub fn witness_points(&self) -> Vec<Point> {
        match self {
            MaxSet::Point { at, .. } => vec![*at],
            MaxSet::Segment { from, to, .. } => vec![*from, *to],
        }
    }

    /// Hausdorff distance to the segment `[a, b]` (a point when `a == b`).
    pub fn hausdorff_to_segment(&self, a: &Point, b: &Point) -> f64 {
        let seg = |p: &Point, u: &Point, v: &Point| super::polygon::segment_distance(p, u, v);
        match self {
            MaxSet::Point { at, .. } => seg(at, a, b).max((at - a).norm()).max((at - b).norm()),
            MaxSet::Segment { from, to, .. } => {
                let forward = seg(from, a, b).max(seg(to, a, b));
                let backward = seg(a, from, to).max(seg(b, from, to));
                forward.max(backward)
            }
        }
    }
}

/// One stage `A_k` of the soul iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoulStage {
    pub dimension: u8,
    pub witness_points: Vec<Point>,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoulConstruction {
    pub stages: Vec<SoulStage>,
    pub soul: Point,
}

/// Optimal face of the Chebyshev LP: the eroded body at depth equal to the inradius.
///
/// A two-dimensional body's optimal face is one-dimensional only when two opposite
/// parallel constraints are tight; the segment then runs perpendicular to them and is
/// clipped by every other constraint shifted by the inradius.
pub(crate) fn max_set(body: &HalfplaneBody) -> Result<MaxSet> {
    let level = body.inradius();
    let x0 = body.chebyshev_center();
    let act_tol = 1e-7 * body.diameter();
    let active: Vec<usize> = (0..body.len()).filter(|&i| body.slack(i, &x0) - level <= act_tol).collect();
    if active.is_empty() {
        return Err(GeomError::Internal("no active constraint at the Chebyshev center".into()));
    }

    let mut axis: Option<Vector> = None;
    'outer: for (k, &i) in active.iter().enumerate() {
        for &j in &active[k + 1..] {
            if body.normal(i).dot(&body.normal(j)) <= -1.0 + 1e-9 {
                let n = body.normal(i);
                axis = Some(Vector::new(-n.y, n.x));
                break 'outer;
            }
        }
    }
    let Some(d) = axis else {
        return Ok(MaxSet::Point { at: x0, level });
    };

    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..body.len() {
        let nd = body.normal(i).dot(&d);
        let room = body.slack(i, &x0) - level;
        if nd > 1e-12 {
            hi = hi.min(room / nd);
        } else if nd < -1e-12 {
            lo = lo.max(room / nd);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(GeomError::Internal("maximum segment is unbounded".into()));
    }
    if hi - lo <= 1e-9 * (1.0 + body.diameter()) {
        let at = x0 + d * (0.5 * (lo + hi));
        return Ok(MaxSet::Point { at, level });
    }
    Ok(MaxSet::Segment { from: x0 + d * lo, to: x0 + d * hi, level })
}

/// The iterated soul: a point maximum set is the soul; a segment maximum set is
/// reduced to its midpoint, the maximum set of the intrinsic distance to its ends.
pub fn soul(body: &HalfplaneBody) -> Result<SoulConstruction> {
    let (level, a0) = body.inradius_and_max_set()?;
    let mut stages = vec![SoulStage { dimension: a0.dimension(), witness_points: a0.witness_points(), level }];
    let soul = match a0 {
        MaxSet::Point { at, .. } => at,
        MaxSet::Segment { from, to, .. } => {
            let mid = (from + to) * 0.5;
            stages.push(SoulStage { dimension: 0, witness_points: vec![mid], level: (to - from).norm() * 0.5 });
            mid
        }
    };
    Ok(SoulConstruction { stages, soul })
}
