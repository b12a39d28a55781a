//! Minkowski `R^{1,2}` algebra, causal classification, null geodesics and the
//! chart on their space, skies, and the conformal transformation group
//! (translations, orthochronous Lorentz maps, dilations).
//!
//! A future-pointing null geodesic is encoded as `(q, theta)`: `q` is its
//! intersection with the `{t = 0}` plane and `theta` the angle of its spatial
//! direction, so the geodesic is `s -> (s, q + s*u(theta))` with
//! `u(theta) = (cos theta, sin theta)`. The contact form in this chart is
//! `lambda = cos(theta) dq1 + sin(theta) dq2`.

mod conformal;
mod minkowski;

pub use conformal::{
    apply_conformal, apply_conformal_ray, chart_of_transported, ConformalFactor, ConformalMap,
    Mat3,
};
pub use minkowski::{CausalClass, Event, Orientation, TangentVec};

use serde::Serialize;
use thiserror::Error;

use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("vector is not null: eta(v,v) = {0:.3e}")]
    NotNull(f64),
    #[error("vector is not future-pointing (vt = {0:.3e})")]
    NotFuture(f64),
    #[error("invalid Lorentz matrix: {0}")]
    BadLorentz(String),
    #[error("dilation scale must be positive, got {0}")]
    BadDilation(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Relative tolerance used to decide whether eta(v,v) vanishes.
pub const NULL_CLASS_TOL: f64 = 1e-12;

/// Reduce an angle to `[0, 2*pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta % TAU;
    if a < 0.0 {
        a += TAU;
    }
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// Difference of two angles reduced to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

/// Unit spatial vector `u(theta) = (cos theta, sin theta)`.
pub fn unit_dir(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// `v` rotated by +90 degrees in the spatial plane.
pub fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

pub fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// 2D cross product `a1*b2 - a2*b1`.
pub fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// A future-pointing null geodesic in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullRay {
    /// Intersection with the `{t = 0}` plane.
    pub q: [f64; 2],
    /// Spatial direction angle, stored reduced to `[0, 2*pi)`.
    pub theta: f64,
}

impl NullRay {
    pub fn new(q: [f64; 2], theta: f64) -> Self {
        Self { q, theta: wrap_angle(theta) }
    }

    /// Spatial direction of motion.
    pub fn dir(&self) -> [f64; 2] {
        unit_dir(self.theta)
    }

    /// The event at affine parameter `s` (equal to coordinate time).
    pub fn at(&self, s: f64) -> Event {
        let u = self.dir();
        Event { t: s, x: self.q[0] + s * u[0], y: self.q[1] + s * u[1] }
    }

    /// The future-pointing null velocity, normalized to unit time component.
    pub fn velocity(&self) -> TangentVec {
        let u = self.dir();
        TangentVec { t: 1.0, x: u[0], y: u[1] }
    }
}

/// A tangent vector of the chart at some ray: `(dq, dtheta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartVec {
    pub dq: [f64; 2],
    pub dtheta: f64,
}

impl ChartVec {
    pub fn new(dq: [f64; 2], dtheta: f64) -> Self {
        Self { dq, dtheta }
    }

    pub fn norm(&self) -> f64 {
        (self.dq[0] * self.dq[0] + self.dq[1] * self.dq[1] + self.dtheta * self.dtheta).sqrt()
    }
}

/// Minkowski pairing `eta(v, w) = -vt*wt + vx*wx + vy*wy`.
pub fn eta(v: TangentVec, w: TangentVec) -> f64 {
    -v.t * w.t + v.x * w.x + v.y * w.y
}

/// Causal classification of a tangent vector, with time orientation read off
/// the sign of the `t` component.
pub fn causal_character(v: TangentVec) -> CausalClass {
    let norm2 = v.t * v.t + v.x * v.x + v.y * v.y;
    if norm2 == 0.0 {
        return CausalClass::Zero;
    }
    let q = eta(v, v);
    let orient = if v.t > 0.0 { Orientation::Future } else { Orientation::Past };
    if q.abs() <= NULL_CLASS_TOL * norm2 {
        CausalClass::Null(orient)
    } else if q < 0.0 {
        CausalClass::Timelike(orient)
    } else {
        CausalClass::Spacelike
    }
}

/// Chart coordinates of the null geodesic through `p` with velocity `v`.
///
/// `v` must be future-pointing null. Two inputs on the same geodesic map to
/// the same ray up to floating rounding.
pub fn chart_of_geodesic(p: Event, v: TangentVec) -> Result<NullRay> {
    let norm2 = v.t * v.t + v.x * v.x + v.y * v.y;
    let q = eta(v, v);
    if norm2 == 0.0 || q.abs() > NULL_CLASS_TOL * norm2 {
        return Err(GeometryError::NotNull(q));
    }
    if v.t <= 0.0 {
        return Err(GeometryError::NotFuture(v.t));
    }
    let ux = v.x / v.t;
    let uy = v.y / v.t;
    let theta = wrap_angle(uy.atan2(ux));
    let q = [p.x - p.t * ux, p.y - p.t * uy];
    Ok(NullRay { q, theta })
}

/// The contact form `lambda = u(theta) . dq` evaluated on a chart vector.
pub fn contact_form_eval(r: &NullRay, w: &ChartVec) -> f64 {
    dot2(r.dir(), w.dq)
}

/// The sky of an event: the Legendrian circle of rays through it.
pub fn sky(p: Event) -> impl Fn(f64) -> NullRay {
    move |theta: f64| {
        let u = unit_dir(theta);
        NullRay::new([p.x - p.t * u[0], p.y - p.t * u[1]], theta)
    }
}

/// Chart tangent of the sky curve at angle `theta` (derivative in `theta`).
pub fn sky_tangent(p: Event, theta: f64) -> ChartVec {
    let du = rot90(unit_dir(theta));
    ChartVec { dq: [-p.t * du[0], -p.t * du[1]], dtheta: 1.0 }
}
