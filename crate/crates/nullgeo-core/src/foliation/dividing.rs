//! The dividing set of the boundary torus with respect to the lifted
//! dilation contact field `Y = q . d/dq`.
//!
//! The dividing set is the zero set of `lambda(Y) = q . u(theta)` on the
//! torus. For a revolution region this reduces to the latitude equation
//! `r(t) r'(t) = t`, i.e. `rho'(t) = 2t`, one circle per branch sheet and
//! root. The result is validated: `Y` must be transverse to the torus, each
//! component transverse to the characteristic foliation, and the components
//! must separate the two singular circles.

use serde::Serialize;

use crate::geometry::{dot2, unit_dir, Event};
use crate::numerics::{find_root, Tolerance};
use crate::region::{star_shaped_check, Region};

use super::torus::{
    boundary_torus, plane_transversality, revolution_torus_point, Branch, FoliationDirection,
    SampledTorus, TorusPoint, TorusResolution,
};
use super::{FoliationError, Result, SINGULAR_MARGIN};

/// One closed dividing curve, sampled along the azimuth.
#[derive(Debug, Clone)]
pub struct DividingComponent {
    pub branch: Branch,
    /// Meridian fraction at which the component sits (mean over azimuths).
    pub meridian: f64,
    pub points: Vec<TorusPoint>,
}

/// The dividing set with its transversality diagnostics.
#[derive(Debug, Clone)]
pub struct DividingSet {
    pub components: Vec<DividingComponent>,
    /// Latitudes (tangency times) of the components, one entry per component.
    pub latitudes: Vec<f64>,
    /// Minimum over torus samples of the normalized transversality of `Y`
    /// to the torus.
    pub min_y_transversality: f64,
    /// Minimum angle between the components and the foliation direction.
    pub min_foliation_angle: f64,
    /// Whether the two singular circles lie in different complementary
    /// annuli of the dividing set.
    pub separates_singular_circles: bool,
}

/// Summary of the dividing-set checks, serialized by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct DividingSummary {
    pub component_count: usize,
    pub latitudes: Vec<f64>,
    pub min_y_transversality: f64,
    pub min_foliation_angle: f64,
    pub separates_singular_circles: bool,
}

impl DividingSet {
    pub fn summary(&self) -> DividingSummary {
        DividingSummary {
            component_count: self.components.len(),
            latitudes: self.latitudes.clone(),
            min_y_transversality: self.min_y_transversality,
            min_foliation_angle: self.min_foliation_angle,
            separates_singular_circles: self.separates_singular_circles,
        }
    }
}

/// `lambda(Y)` at a torus point: `q . u(theta)`.
pub fn contact_pairing_with_dilation(p: &TorusPoint) -> f64 {
    dot2(p.chart.q, unit_dir(p.chart.theta))
}

/// Compute the dividing set of the torus for the dilation field centred at
/// `center`.
///
/// Requires the region to be star-shaped about `center`; a non-origin center
/// is handled by translating the region so the center becomes the dilation
/// fixed point.
pub fn dividing_set(
    region: &Region,
    center: Event,
    resolution: TorusResolution,
) -> Result<DividingSet> {
    let report = star_shaped_check(region, center, 64)?;
    if !report.passed {
        return Err(FoliationError::NotStarShaped);
    }
    if center != Event::ORIGIN {
        let translated = Region::transformed(
            region.clone(),
            crate::geometry::ConformalMap::translation(-center.t, -center.x, -center.y),
        );
        return dividing_set(&translated, Event::ORIGIN, resolution);
    }

    let torus = boundary_torus(region, resolution)?;
    let mut components = Vec::new();

    match region {
        Region::Revolution(profile) => {
            let (lat_lo, lat_hi) = profile.latitudes();
            // roots of rho'(t) - 2t on the closed band
            let w = |t: f64| 0.5 * profile.drho(t) - t;
            let mut roots = Vec::new();
            let n = 512;
            let tol = Tolerance { abs_tol: 1e-14, rel_tol: 1e-14, max_steps: 200 };
            let mut prev_t = lat_lo;
            let mut prev_w = w(prev_t);
            for k in 1..=n {
                let t = lat_lo + (lat_hi - lat_lo) * k as f64 / n as f64;
                let v = w(t);
                if prev_w == 0.0 {
                    roots.push(prev_t);
                } else if prev_w * v < 0.0 {
                    roots.push(
                        find_root(w, prev_t, t, &tol).map_err(FoliationError::Numerics)?,
                    );
                }
                prev_t = t;
                prev_w = v;
            }
            for branch in [Branch::Plus, Branch::Minus] {
                for &t_root in &roots {
                    let points: Vec<TorusPoint> = (0..resolution.n_azimuth)
                        .map(|j| {
                            let phi =
                                std::f64::consts::TAU * j as f64 / resolution.n_azimuth as f64;
                            revolution_torus_point(profile, t_root, phi, branch)
                        })
                        .collect();
                    components.push(DividingComponent {
                        branch,
                        meridian: (t_root - lat_lo) / (lat_hi - lat_lo),
                        points,
                    });
                }
            }
        }
        Region::Diamond => {
            // lambda(Y) = cos(theta - phi): one circle per sheet at the
            // meridian midpoint
            for branch in [Branch::Plus, Branch::Minus] {
                let points: Vec<TorusPoint> = (0..resolution.n_azimuth)
                    .map(|j| {
                        let phi = std::f64::consts::TAU * j as f64 / resolution.n_azimuth as f64;
                        torus.point_at(branch, 0.5, phi).expect("diamond points are closed-form")
                    })
                    .collect();
                components.push(DividingComponent { branch, meridian: 0.5, points });
            }
        }
        _ => {
            // generic path: per azimuth and sheet, locate the zeros of
            // lambda(Y) along the meridian and require a uniform root count
            components = shooting_dividing_components(&torus, resolution)?;
        }
    }

    // (a) Y transverse to the torus at all samples
    let mut min_y = f64::INFINITY;
    for branch in [Branch::Plus, Branch::Minus] {
        for i in 0..resolution.n_meridian {
            let m = torus.meridian_fraction(i);
            if m < SINGULAR_MARGIN || m > 1.0 - SINGULAR_MARGIN {
                continue;
            }
            for j in 0..resolution.n_azimuth {
                let phi = torus.azimuth(j);
                let pt = torus.grid_point(branch, i, j);
                let (s_m, s_phi) = torus.tangent_basis(branch, m, phi)?;
                let y = [pt.chart.q[0], pt.chart.q[1], 0.0];
                min_y = min_y.min(plane_transversality(s_m, s_phi, y));
            }
        }
    }
    if min_y < 1e-4 {
        return Err(FoliationError::NotTransverse(format!(
            "dilation field tangent to the torus (min normalized transversality {min_y:.3e})"
        )));
    }

    // (b) components transverse to the characteristic foliation
    let mut min_angle = f64::INFINITY;
    for comp in &components {
        for (j, pt) in comp.points.iter().enumerate() {
            let phi = std::f64::consts::TAU * j as f64 / comp.points.len() as f64;
            let dir = torus.foliation_direction(comp.branch, comp.meridian, phi)?;
            let FoliationDirection::Regular(f) = dir else {
                return Err(FoliationError::NotTransverse(
                    "dividing component touches a singular point".to_string(),
                ));
            };
            // component tangent: the azimuth coordinate line
            let (_, s_phi) = torus.tangent_basis(comp.branch, comp.meridian, phi)?;
            let ang = super::torus::line_angle(f, s_phi);
            min_angle = min_angle.min(ang);
            let _ = pt;
        }
    }

    // (c) components separate the singular circles: on the meridian circle
    // (plus sheet 0..1, minus sheet 1..2, circles at 0 and 1) the component
    // positions must alternate with the circle positions
    let mut positions: Vec<f64> = components
        .iter()
        .map(|c| match c.branch {
            Branch::Plus => c.meridian,
            Branch::Minus => 2.0 - c.meridian,
        })
        .collect();
    positions.sort_by(f64::total_cmp);
    let separates = if positions.is_empty() {
        false
    } else {
        let mut ok = true;
        for w in 0..positions.len() {
            let a = positions[w];
            let b = if w + 1 < positions.len() { positions[w + 1] } else { positions[0] + 2.0 };
            // number of singular positions (0, 1, and 2 = 0) inside (a, b)
            let circles = [0.0, 1.0, 2.0, 3.0];
            let inside = circles.iter().filter(|&&c| c > a && c < b).count();
            if inside != 1 {
                ok = false;
            }
        }
        ok
    };

    let latitudes = components
        .iter()
        .map(|c| c.points.iter().map(|p| p.t).sum::<f64>() / c.points.len() as f64)
        .collect();

    Ok(DividingSet {
        components,
        latitudes,
        min_y_transversality: min_y,
        min_foliation_angle: min_angle,
        separates_singular_circles: separates,
    })
}

/// Meridian scan of `lambda(Y)` for shooting-sampled tori.
fn shooting_dividing_components(
    torus: &SampledTorus,
    resolution: TorusResolution,
) -> Result<Vec<DividingComponent>> {
    let mut components = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        let mut per_azimuth: Vec<Vec<(f64, TorusPoint)>> = Vec::new();
        for j in 0..resolution.n_azimuth {
            let phi = torus.azimuth(j);
            let w_at = |m: f64| -> Result<f64> {
                Ok(contact_pairing_with_dilation(&torus.point_at(branch, m, phi)?))
            };
            let n = 48;
            let mut roots = Vec::new();
            let lo_m = SINGULAR_MARGIN;
            let hi_m = 1.0 - SINGULAR_MARGIN;
            let mut prev_m = lo_m;
            let mut prev_w = w_at(prev_m)?;
            for k in 1..=n {
                let m = lo_m + (hi_m - lo_m) * k as f64 / n as f64;
                let v = w_at(m)?;
                if prev_w * v < 0.0 {
                    // bisection on the meridian fraction
                    let mut a = prev_m;
                    let mut b = m;
                    let mut wa = prev_w;
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        let wm = w_at(mid)?;
                        if wa * wm <= 0.0 {
                            b = mid;
                        } else {
                            a = mid;
                            wa = wm;
                        }
                    }
                    let m_root = 0.5 * (a + b);
                    roots.push((m_root, torus.point_at(branch, m_root, phi)?));
                }
                prev_m = m;
                prev_w = v;
            }
            per_azimuth.push(roots);
        }
        let count = per_azimuth[0].len();
        if per_azimuth.iter().any(|r| r.len() != count) {
            return Err(FoliationError::Mismatch(
                "non-uniform dividing-set intersections along the azimuth".to_string(),
            ));
        }
        for idx in 0..count {
            let points: Vec<TorusPoint> =
                per_azimuth.iter().map(|r| r[idx].1.clone()).collect();
            let meridian =
                per_azimuth.iter().map(|r| r[idx].0).sum::<f64>() / per_azimuth.len() as f64;
            components.push(DividingComponent { branch, meridian, points });
        }
    }
    Ok(components)
}
