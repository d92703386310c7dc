use nalgebra::Vector2;

pub type Point = Vector2<f64>;
pub type Vector = Vector2<f64>;

/// Unsigned angle in `[0, π]` between two nonzero vectors.
pub fn angle_between(a: &Vector, b: &Vector) -> f64 {
    let cross = a.x * b.y - a.y * b.x;
    cross.abs().atan2(a.dot(b))
}

pub(crate) fn cross(a: &Vector, b: &Vector) -> f64 {
    a.x * b.y - a.y * b.x
}

pub(crate) fn from_angle(theta: f64) -> Vector {
    Vector::new(theta.cos(), theta.sin())
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_pi(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut w = theta.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

pub(crate) fn rotate(v: &Vector, theta: f64) -> Vector {
    let (s, c) = theta.sin_cos();
    Vector::new(c * v.x - s * v.y, s * v.x + c * v.y)
}
