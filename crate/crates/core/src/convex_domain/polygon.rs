//! Vertex recovery for a bounded halfplane intersection (sorted-angle deque sweep).

use std::collections::VecDeque;

use super::Halfplane;
use crate::geom::cross;
use crate::Point;

fn intersect(a: &Halfplane, b: &Halfplane) -> Option<Point> {
    let det = cross(&a.normal, &b.normal);
    if det.abs() < 1e-15 {
        return None;
    }
    let x = (a.offset * b.normal.y - b.offset * a.normal.y) / det;
    let y = (a.normal.x * b.offset - b.normal.x * a.offset) / det;
    Some(Point::new(x, y))
}

fn outside(p: &Option<Point>, h: &Halfplane, eps: f64) -> bool {
    match p {
        Some(p) => h.normal.dot(p) > h.offset + eps,
        None => true,
    }
}

/// Counterclockwise vertex list of `∩ {n_i·x <= c_i}`; empty when the intersection
/// has no interior. Callers guarantee boundedness.
pub(crate) fn vertices(planes: &[Halfplane]) -> Vec<Point> {
    let mut sorted: Vec<&Halfplane> = planes.iter().collect();
    sorted.sort_by(|a, b| {
        let ta = a.normal.y.atan2(a.normal.x);
        let tb = b.normal.y.atan2(b.normal.x);
        ta.total_cmp(&tb).then(a.offset.total_cmp(&b.offset))
    });
    // Keep only the tightest of parallel same-direction constraints.
    let mut lines: Vec<&Halfplane> = Vec::with_capacity(sorted.len());
    for h in sorted {
        if let Some(last) = lines.last() {
            if (last.normal - h.normal).norm() < 1e-12 {
                continue;
            }
        }
        lines.push(h);
    }
    let scale = planes.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
    let eps = 1e-12 * scale;

    let mut dq: VecDeque<&Halfplane> = VecDeque::new();
    for h in lines {
        while dq.len() >= 2 && outside(&intersect(dq[dq.len() - 2], dq[dq.len() - 1]), h, eps) {
            dq.pop_back();
        }
        while dq.len() >= 2 && outside(&intersect(dq[0], dq[1]), h, eps) {
            dq.pop_front();
        }
        dq.push_back(h);
    }
    while dq.len() >= 3 && outside(&intersect(dq[dq.len() - 2], dq[dq.len() - 1]), dq[0], eps) {
        dq.pop_back();
    }
    while dq.len() >= 3 && outside(&intersect(dq[0], dq[1]), dq[dq.len() - 1], eps) {
        dq.pop_front();
    }
    if dq.len() < 3 {
        return Vec::new();
    }
    let n = dq.len();
    let mut out: Vec<Point> = Vec::with_capacity(n);
    for k in 0..n {
        let Some(p) = intersect(dq[k], dq[(k + 1) % n]) else {
            return Vec::new();
        };
        if out.last().is_none_or(|q| (q - p).norm() > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= eps {
        out.pop();
    }
    if out.len() < 3 || signed_area(&out) <= 0.0 {
        return Vec::new();
    }
    out
}

pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross(&v[i], &v[(i + 1) % n])).sum::<f64>() / 2.0
}

pub(crate) fn diameter(v: &[Point]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max((v[i] - v[j]).norm());
        }
    }
    best
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub(crate) fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
