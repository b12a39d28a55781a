//! Geometry of the space of null geodesics of regions in Minkowski 3-space.
//!
//! The library works in the chart `(q, theta)` on the space of
//! future-pointing null geodesics of `R^{1,2}`: a geodesic is labelled by its
//! intersection `q` with the `{t = 0}` plane and its spatial direction angle
//! `theta`. In this chart the canonical contact form is
//! `lambda = cos(theta) dq1 + sin(theta) dq2`.
//!
//! On top of that chart the crate builds:
//!
//! * regions of revolution (and implicit / conformally transformed regions)
//!   with their boundary-defining function `H`,
//! * the causal classification of the region boundary and the strong
//!   null-convexity checks,
//! * the boundary torus of the region's space of null geodesics, its
//!   characteristic foliation, singular circles and dividing set,
//! * the rotation-angle invariant of the singular circles, computed both by
//!   closed-form quadrature and by tracing lightlike curves, together with
//!   conformal-class comparison verdicts.

pub mod boundary;
pub mod foliation;
pub mod geometry;
pub mod invariant;
pub mod numerics;
pub mod region;
pub mod selftest;

pub use geometry::{CausalClass, ChartVec, ConformalMap, Event, NullRay, TangentVec};
pub use invariant::{CompareVerdict, RotationResult, Verdict};
pub use numerics::Tolerance;
pub use region::{Profile, Region};
