//! The boundary torus of a region's space of null geodesics in the chart,
//! its characteristic foliation (computed two independent ways), the singular
//! circles, and the dividing set of the dilation contact field.
//!
//! A point of the torus is a boundary tangency: an event on the region
//! boundary together with a null direction tangent there, mapped to the chart
//! through the geodesic it spans. Two branch sheets (the two null families
//! over the timelike band) glue along the two singular circles.

mod dividing;
mod leaf;
mod singular;
mod torus;

pub use dividing::{
    contact_pairing_with_dilation, dividing_set, DividingComponent, DividingSet, DividingSummary,
};
pub use leaf::{
    integrate_leaf, integrate_leaf_dir, never_revisits_start, time_strictly_monotone,
    trace_ambient_leaf, AmbientLeaf, Leaf, LeafEnd,
};
pub use singular::{singular_circle_event, singular_set, SingularCircle, SingularSet};
pub use torus::{
    boundary_torus, chart_foliation_direction, leaf_dphi_dt, line_angle, plane_transversality,
    revolution_leaf_tangent, revolution_torus_point, Branch, FoliationDirection, SampledTorus,
    TorusPoint, TorusResolution,
};

use thiserror::Error;

use crate::boundary::BoundaryError;
use crate::numerics::NumericsError;
use crate::region::RegionError;

#[derive(Debug, Error)]
pub enum FoliationError {
    #[error("integration budget exhausted: {0}")]
    Budget(String),
    #[error("lost the boundary surface: {0}")]
    LostSurface(String),
    #[error("contact field is not transverse: {0}")]
    NotTransverse(String),
    #[error("tangent basis is ill-conditioned at meridian {m:.4}, azimuth {phi:.4}")]
    IllConditioned { m: f64, phi: f64 },
    #[error("independent computations disagree: {0}")]
    Mismatch(String),
    #[error("region is not star-shaped about the requested center")]
    NotStarShaped,
    #[error("{0} regions are not supported by this operation")]
    Unsupported(&'static str),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, FoliationError>;

/// Meridian margin (as a fraction of the band) around the singular circles
/// inside which direction comparisons are skipped: the `(t, phi)` chart of a
/// sheet degenerates there.
pub const SINGULAR_MARGIN: f64 = 1e-3;
