//! The singular circles of the characteristic foliation, computed two ways
//! and cross-validated: as the torus image of the lightlike latitudes, and
//! from the chart-side degeneracy of the contact pairing.

use crate::geometry::{angle_diff, wrap_angle, Event, TangentVec, unit_dir};
use crate::numerics::{find_root, Tolerance};
use crate::region::Region;

use super::torus::{circle_polar_angles, revolution_torus_point, Branch, TorusPoint};
use super::{FoliationError, Result};

/// Which singular circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularCircle {
    Lower,
    Upper,
}

/// The two singular circles as sampled chart curves, with the measured
/// disagreement between the two computations.
#[derive(Debug, Clone)]
pub struct SingularSet {
    pub lower: Vec<TorusPoint>,
    pub upper: Vec<TorusPoint>,
    /// Maximal chart distance between the latitude route and the chart
    /// degeneracy route over all azimuth samples.
    pub max_mismatch: f64,
}

/// Chart distance used for the cross-validation: Euclidean in `q` plus the
/// reduced angle difference in `theta`.
fn chart_distance(a: &TorusPoint, b: &TorusPoint) -> f64 {
    let dq = [a.chart.q[0] - b.chart.q[0], a.chart.q[1] - b.chart.q[1]];
    (dq[0] * dq[0] + dq[1] * dq[1]).sqrt() + angle_diff(a.chart.theta, b.chart.theta).abs()
}

/// The event of the requested singular circle at a given azimuth, for
/// regions without a closed form (shooting + bracketed root finding on the
/// gradient's causal character along the meridian).
pub fn singular_circle_event(
    region: &Region,
    center: Event,
    which: SingularCircle,
    phi: f64,
) -> Result<Event> {
    let (psi_up, psi_lo) = circle_polar_angles(region, center, phi)?;
    let psi = match which {
        SingularCircle::Upper => psi_up,
        SingularCircle::Lower => psi_lo,
    };
    let u = unit_dir(phi);
    let dir = TangentVec::new(psi.cos(), psi.sin() * u[0], psi.sin() * u[1]);
    Ok(crate::boundary::boundary_point_by_shooting(region, center, dir)?)
}

/// Compute the two singular circles of the torus and cross-validate them
/// against the chart-side degeneracy detection.
///
/// Route one places the circles at the lightlike latitudes (for revolution
/// regions: the validated roots of `rho'^2 = 4 rho`; for shooting regions:
/// the sign change of the gradient causal character along meridians). Route
/// two locates, per azimuth, the meridian boundary of the locus where the
/// chart foliation direction is defined (both contact pairings nonzero).
pub fn singular_set(region: &Region, n_azimuth: usize) -> Result<SingularSet> {
    match region {
        Region::Revolution(profile) => {
            let (lat_lo, lat_hi) = profile.latitudes();
            let mut lower = Vec::with_capacity(n_azimuth);
            let mut upper = Vec::with_capacity(n_azimuth);
            let mut max_mismatch = 0.0_f64;
            for j in 0..n_azimuth {
                let phi = std::f64::consts::TAU * j as f64 / n_azimuth as f64;
                let lo_pt = revolution_torus_point(profile, lat_lo, phi, Branch::Plus);
                let hi_pt = revolution_torus_point(profile, lat_hi, phi, Branch::Plus);

                // route two: the last meridian position where beta^2 > 0,
                // located by bisection through the chart pipeline
                let beta2 = |t: f64| {
                    let rp = profile.dradius(t);
                    1.0 - rp * rp
                };
                let mid = 0.5 * (lat_lo + lat_hi);
                let span = lat_hi - lat_lo;
                let upper_b = bisect_band_edge(&beta2, mid, lat_hi + 0.05 * span);
                let lower_b = bisect_band_edge(&beta2, mid, lat_lo - 0.05 * span);
                let hi_pt_b = revolution_torus_point(profile, upper_b, phi, Branch::Plus);
                let lo_pt_b = revolution_torus_point(profile, lower_b, phi, Branch::Plus);
                max_mismatch = max_mismatch
                    .max(chart_distance(&hi_pt, &hi_pt_b))
                    .max(chart_distance(&lo_pt, &lo_pt_b));

                lower.push(lo_pt);
                upper.push(hi_pt);
            }
            finish(lower, upper, max_mismatch)
        }
        Region::Diamond => {
            // route one: circles {theta = phi} and {theta = phi + pi} on
            // |q| = 1; route two: per azimuth, root of the contact pairing
            // sin(theta - phi) on the meridian
            let mut lower = Vec::with_capacity(n_azimuth);
            let mut upper = Vec::with_capacity(n_azimuth);
            let mut max_mismatch = 0.0_f64;
            let tol = Tolerance { abs_tol: 1e-14, rel_tol: 1e-14, max_steps: 200 };
            for j in 0..n_azimuth {
                let phi = std::f64::consts::TAU * j as f64 / n_azimuth as f64;
                let pairing = |theta: f64| (theta - phi).sin();
                let root_low =
                    find_root(pairing, phi - 0.8, phi + 0.8, &tol).map_err(FoliationError::Numerics)?;
                let root_up = find_root(
                    pairing,
                    phi + std::f64::consts::PI - 0.8,
                    phi + std::f64::consts::PI + 0.8,
                    &tol,
                )
                .map_err(FoliationError::Numerics)?;
                max_mismatch = max_mismatch
                    .max(angle_diff(root_low, phi).abs())
                    .max(angle_diff(root_up, phi + std::f64::consts::PI).abs());
                lower.push(diamond_circle_point(phi, 0.0));
                upper.push(diamond_circle_point(phi, std::f64::consts::PI));
            }
            finish(lower, upper, max_mismatch)
        }
        _ => {
            let center = region.interior_point();
            let mut lower = Vec::with_capacity(n_azimuth);
            let mut upper = Vec::with_capacity(n_azimuth);
            let mut max_mismatch = 0.0_f64;
            for j in 0..n_azimuth {
                let phi = std::f64::consts::TAU * j as f64 / n_azimuth as f64;
                for which in [SingularCircle::Lower, SingularCircle::Upper] {
                    let event = singular_circle_event(region, center, which, phi)?;
                    let bp = crate::boundary::classify_boundary_point(region, event)?;
                    let dir = bp.null_dirs.first().copied().ok_or_else(|| {
                        FoliationError::LostSurface(
                            "no null direction on a located singular circle".to_string(),
                        )
                    })?;
                    let chart = crate::geometry::chart_of_geodesic(event, dir)
                        .map_err(|e| FoliationError::LostSurface(e.to_string()))?;
                    // route two: degeneracy of the branch discriminant seen
                    // from the chart pipeline, bisected along the meridian
                    let mismatch = shooting_route_two_mismatch(region, center, phi, which, event)?;
                    max_mismatch = max_mismatch.max(mismatch);
                    let pt = TorusPoint {
                        t: event.t,
                        phi,
                        branch: Branch::Plus,
                        chart,
                        time_t: event.t,
                        event,
                        null_dir: dir,
                    };
                    match which {
                        SingularCircle::Lower => lower.push(pt),
                        SingularCircle::Upper => upper.push(pt),
                    }
                }
            }
            finish(lower, upper, max_mismatch)
        }
    }
}

fn finish(lower: Vec<TorusPoint>, upper: Vec<TorusPoint>, max_mismatch: f64) -> Result<SingularSet> {
    if max_mismatch > 1e-6 {
        return Err(FoliationError::Mismatch(format!(
            "singular-set routes disagree by {max_mismatch:.3e} in chart coordinates"
        )));
    }
    Ok(SingularSet { lower, upper, max_mismatch })
}

fn diamond_circle_point(phi: f64, offset: f64) -> TorusPoint {
    let u = unit_dir(phi);
    let theta = wrap_angle(phi + offset);
    let d = unit_dir(theta);
    TorusPoint {
        t: 0.0,
        phi,
        branch: Branch::Plus,
        chart: crate::geometry::NullRay::new(u, theta),
        time_t: 0.0,
        event: Event::new(0.0, u[0], u[1]),
        null_dir: TangentVec::new(1.0, d[0], d[1]),
    }
}

/// Bisect the boundary of `{ indicator > 0 }` between `inside` (where the
/// indicator is positive) and `outside`.
fn bisect_band_edge(indicator: &dyn Fn(f64) -> f64, inside: f64, outside: f64) -> f64 {
    let mut lo = inside;
    let mut hi = outside;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if indicator(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Route-two check for shooting regions: bisect the meridian edge of the
/// band (where the null-direction discriminant vanishes) and compare the
/// located event with the route-one event.
fn shooting_route_two_mismatch(
    region: &Region,
    center: Event,
    phi: f64,
    which: SingularCircle,
    route_one: Event,
) -> Result<f64> {
    let (psi_up, psi_lo) = circle_polar_angles(region, center, phi)?;
    let u = unit_dir(phi);
    let event_at = |psi: f64| {
        let dir = TangentVec::new(psi.cos(), psi.sin() * u[0], psi.sin() * u[1]);
        crate::boundary::boundary_point_by_shooting(region, center, dir)
    };
    let discriminant = |psi: f64| -> f64 {
        match event_at(psi) {
            Ok(ev) => match region.eval(ev) {
                Ok(e) => {
                    let gs = e.grad.spatial();
                    let g2 = gs[0] * gs[0] + gs[1] * gs[1];
                    if g2 <= 0.0 {
                        return -1.0;
                    }
                    1.0 - (e.grad.t * e.grad.t) / g2
                }
                Err(_) => -1.0,
            },
            Err(_) => -1.0,
        }
    };
    let mid = 0.5 * (psi_up + psi_lo);
    let outside = match which {
        SingularCircle::Upper => psi_up - 0.25 * (psi_lo - psi_up),
        SingularCircle::Lower => psi_lo + 0.25 * (psi_lo - psi_up),
    };
    let edge = bisect_band_edge(&discriminant, mid, outside);
    let ev = event_at(edge).map_err(FoliationError::Boundary)?;
    let d = ev - route_one;
    Ok(d.norm())
}
