//! Events and tangent vectors of Minkowski `R^{1,2}` (units with c = 1).

use serde::Serialize;

/// A point of `R^{1,2}` in standard coordinates `(t, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Event {
    pub const ORIGIN: Event = Event { t: 0.0, x: 0.0, y: 0.0 };

    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn spatial(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Azimuth of the spatial projection.
    pub fn azimuth(&self) -> f64 {
        super::wrap_angle(self.y.atan2(self.x))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t, self.x, self.y]
    }
}

impl std::ops::Add<TangentVec> for Event {
    type Output = Event;
    fn add(self, v: TangentVec) -> Event {
        Event { t: self.t + v.t, x: self.x + v.x, y: self.y + v.y }
    }
}

impl std::ops::Sub for Event {
    type Output = TangentVec;
    fn sub(self, other: Event) -> TangentVec {
        TangentVec { t: self.t - other.t, x: self.x - other.x, y: self.y - other.y }
    }
}

/// A tangent vector (Minkowski space is flat, so no basepoint is carried).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentVec {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl TangentVec {
    pub const ZERO: TangentVec = TangentVec { t: 0.0, x: 0.0, y: 0.0 };

    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn spatial(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn scale(&self, s: f64) -> TangentVec {
        TangentVec { t: s * self.t, x: s * self.x, y: s * self.y }
    }

    /// Euclidean norm of all three components.
    pub fn norm(&self) -> f64 {
        (self.t * self.t + self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t, self.x, self.y]
    }
}

impl std::ops::Add for TangentVec {
    type Output = TangentVec;
    fn add(self, o: TangentVec) -> TangentVec {
        TangentVec { t: self.t + o.t, x: self.x + o.x, y: self.y + o.y }
    }
}

impl std::ops::Sub for TangentVec {
    type Output = TangentVec;
    fn sub(self, o: TangentVec) -> TangentVec {
        TangentVec { t: self.t - o.t, x: self.x - o.x, y: self.y - o.y }
    }
}

/// Time orientation of a causal vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Future,
    Past,
}

/// Causal character of a tangent vector. `Zero` carries no orientation and
/// orientation is only defined for causal (timelike or null) vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CausalClass {
    Timelike(Orientation),
    Null(Orientation),
    Spacelike,
    Zero,
}
