//! Pointwise causal classification of the region boundary, lightlike
//! latitudes, null tangent directions, the tangency functional `G`, and the
//! strong null-convexity certification.
//!
//! The boundary of a region decomposes into a timelike part (two null tangent
//! directions), a lightlike part (one) and a spacelike part (none), by the
//! signature of the induced metric. For a surface of revolution the class at
//! latitude `t` is the sign of `4 rho(t) - rho'(t)^2`.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    chart_of_geodesic, cross2, dot2, rot90, unit_dir, Event, NullRay, TangentVec,
};
use crate::numerics::{find_root, NumericsError, Tolerance};
use crate::region::{quadratic_form_pair, HEval, Profile, Region, RegionError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BoundaryError {
    #[error("point is not on the boundary: H = {0:.3e}")]
    NotOnBoundary(f64),
    #[error("degenerate gradient at ({0:.3e}, {1:.3e}, {2:.3e})")]
    DegenerateGradient(f64, f64, f64),
    #[error("ray misses the region's bounding box")]
    NoBracket,
    #[error("boundary shooting failed: {0}")]
    Shooting(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, BoundaryError>;

/// Relative tolerance on `|H|` for a point to count as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Relative tolerance on `eta(grad_eta H, grad_eta H)` for the lightlike class.
pub const LIGHTLIKE_TOL: f64 = 1e-8;

/// Causal class of the induced metric at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceClass {
    TimelikePart,
    LightlikePart,
    SpacelikePart,
}

/// A classified boundary point with its future null tangent directions
/// (normalized to unit time component; 2, 1 or 0 entries).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub event: Event,
    pub class: SurfaceClass,
    pub null_dirs: Vec<TangentVec>,
}

/// `eta(grad_eta H, grad_eta H) = -H_t^2 + H_x^2 + H_y^2` for the
/// index-raised gradient; positive exactly on the timelike part.
pub fn gradient_eta_norm(grad: TangentVec) -> f64 {
    -grad.t * grad.t + grad.x * grad.x + grad.y * grad.y
}

/// Classify a boundary point and compute its null tangent directions.
///
/// The returned directions are ordered `[plus, minus]` on the timelike part:
/// the plus family is the one whose spatial part is counterclockwise of the
/// outward spatial normal.
pub fn classify_boundary_point(region: &Region, p: Event) -> Result<BoundaryPoint> {
    let scale = region.h_scale();
    let e = region.eval(p)?;
    if e.h.abs() > BOUNDARY_TOL * scale {
        return Err(BoundaryError::NotOnBoundary(e.h));
    }
    classify_from_eval(p, &e)
}

fn classify_from_eval(p: Event, e: &HEval) -> Result<BoundaryPoint> {
    let grad = e.grad;
    let grad_norm2 = grad.t * grad.t + grad.x * grad.x + grad.y * grad.y;
    if grad_norm2 < 1e-24 {
        return Err(BoundaryError::DegenerateGradient(p.t, p.x, p.y));
    }
    let g_eta = gradient_eta_norm(grad);
    let class = if g_eta.abs() <= LIGHTLIKE_TOL * grad_norm2 {
        SurfaceClass::LightlikePart
    } else if g_eta > 0.0 {
        SurfaceClass::TimelikePart
    } else {
        SurfaceClass::SpacelikePart
    };
    let null_dirs = null_dirs_from_grad(grad, class);
    Ok(BoundaryPoint { event: p, class, null_dirs })
}

fn null_dirs_from_grad(grad: TangentVec, class: SurfaceClass) -> Vec<TangentVec> {
    let gs = grad.spatial();
    let gnorm = (gs[0] * gs[0] + gs[1] * gs[1]).sqrt();
    if gnorm == 0.0 {
        return Vec::new();
    }
    let ghat = [gs[0] / gnorm, gs[1] / gnorm];
    // d = alpha ghat + beta rot90(ghat) with |d| = 1 and dH(1, d) = 0
    let alpha = (-grad.t / gnorm).clamp(-1.0, 1.0);
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    let gperp = rot90(ghat);
    let dir = |b: f64| {
        TangentVec::new(1.0, alpha * ghat[0] + b * gperp[0], alpha * ghat[1] + b * gperp[1])
    };
    match class {
        SurfaceClass::SpacelikePart => Vec::new(),
        SurfaceClass::LightlikePart => vec![dir(0.0)],
        SurfaceClass::TimelikePart => {
            // plus branch: spatial part counterclockwise of the outward
            // normal -ghat, i.e. cross(-ghat, d) > 0, i.e. beta < 0 in the
            // ghat frame
            vec![dir(-beta), dir(beta)]
        }
    }
}

/// Null tangent directions at a boundary point (possibly empty).
pub fn null_tangent_directions(region: &Region, p: Event) -> Result<Vec<TangentVec>> {
    Ok(classify_boundary_point(region, p)?.null_dirs)
}

/// The two lightlike latitudes of a revolution profile.
///
/// Profile validation already locates the two interior roots of
/// `rho'^2 - 4 rho` by a sign sweep and bracketed root finding; this exposes
/// them in ascending order.
pub fn lightlike_latitudes(profile: &Profile) -> (f64, f64) {
    profile.latitudes()
}

/// Parameter window over which a ray should be scanned for a region.
///
/// Implicit regions can only be evaluated inside their own bounding box, so
/// a ray missing that box has no window. For the other variants `H` is
/// defined everywhere and the window is centred on the ray's closest approach
/// to the region.
fn scan_window(region: &Region, ray: &NullRay) -> Option<(f64, f64)> {
    if let Region::Implicit(im) = region {
        return im.bbox.line_window(Event::new(0.0, ray.q[0], ray.q[1]), ray.velocity());
    }
    let bbox = region.bbox();
    let c = bbox.center().as_array();
    let p0 = [0.0, ray.q[0], ray.q[1]];
    let v = ray.velocity().as_array();
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let s_star: f64 = (0..3).map(|i| (c[i] - p0[i]) * v[i]).sum::<f64>() / v2;
    let half = 2.5 * bbox.diagonal().max(1e-6);
    Some((s_star - half, s_star + half))
}

/// Maximize `H` along the ray: returns the argmax event and the maximal value
/// `G`. `G > 0` iff the ray meets the region, `G = 0` (within tolerance) iff
/// the ray lies in the boundary of the region's space of null geodesics.
pub fn tangency_point(region: &Region, ray: &NullRay) -> Result<(Event, f64)> {
    let (lo, hi) = scan_window(region, ray).ok_or(BoundaryError::NoBracket)?;
    let h_at = |s: f64| region.value(ray.at(s)).unwrap_or(f64::NEG_INFINITY);
    let dh_at = |s: f64| -> Result<f64> {
        let e = region.eval(ray.at(s))?;
        let u = ray.dir();
        Ok(e.grad.t + e.grad.x * u[0] + e.grad.y * u[1])
    };

    let n = 256;
    let mut candidates: Vec<f64> = vec![lo, hi];
    let mut prev_s = lo;
    let mut prev_d = dh_at(lo)?;
    let tol = Tolerance { abs_tol: 1e-13 * (hi - lo).max(1.0), rel_tol: 1e-13, max_steps: 200 };
    for k in 1..=n {
        let s = lo + (hi - lo) * k as f64 / n as f64;
        let d = dh_at(s)?;
        if prev_d == 0.0 {
            candidates.push(prev_s);
        } else if prev_d * d < 0.0 {
            let root = find_root(
                |s| {
                    let e = region.eval(ray.at(s)).expect("window stays in the domain");
                    let u = ray.dir();
                    e.grad.t + e.grad.x * u[0] + e.grad.y * u[1]
                },
                prev_s,
                s,
                &tol,
            )?;
            candidates.push(root);
        }
        prev_s = s;
        prev_d = d;
    }

    let mut best_s = lo;
    let mut best_h = f64::NEG_INFINITY;
    for s in candidates {
        let h = h_at(s);
        if h > best_h {
            best_h = h;
            best_s = s;
        }
    }
    Ok((ray.at(best_s), best_h))
}

/// Locate the boundary along the ray `center + s * dir` by a sign sweep and
/// bracketed root finding. Requires `H(center) > 0`.
pub fn boundary_point_by_shooting(
    region: &Region,
    center: Event,
    dir: TangentVec,
) -> Result<Event> {
    let bbox = match region {
        Region::Implicit(im) => im.bbox,
        _ => region.bbox().inflate(1.25),
    };
    let (_, hi) = bbox
        .line_window(center, dir)
        .ok_or_else(|| BoundaryError::Shooting("center is outside the bounding box".to_string()))?;
    let h = |s: f64| region.value(center + dir.scale(s)).unwrap_or(-1.0);
    if h(0.0) <= 0.0 {
        return Err(BoundaryError::Shooting(format!(
            "shooting center is not interior (H = {:.3e})",
            h(0.0)
        )));
    }
    let n = 128;
    let mut prev = 0.0_f64;
    for k in 1..=n {
        let s = hi * k as f64 / n as f64;
        if h(s) < 0.0 {
            let tol = Tolerance { abs_tol: 1e-14 * hi.max(1.0), rel_tol: 1e-14, max_steps: 200 };
            let root = find_root(h, prev, s, &tol)?;
            return Ok(center + dir.scale(root));
        }
        prev = s;
    }
    Err(BoundaryError::Shooting("no boundary crossing along the ray".to_string()))
}

/// Sampling configuration for the convexity certification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvexityGrid {
    /// Boundary samples along the meridian direction.
    pub n_meridian: usize,
    /// Boundary samples around the azimuth.
    pub n_azimuth: usize,
    /// Samples along each scanned ray.
    pub n_ray: usize,
    /// Rays per direction per axis in the chord-connectivity grid.
    pub n_chord: usize,
    /// Threshold on `min |Hess H(v,v)|` below which the region is flagged.
    pub hessian_threshold: f64,
}

impl Default for ConvexityGrid {
    fn default() -> Self {
        Self { n_meridian: 96, n_azimuth: 32, n_ray: 400, n_chord: 18, hessian_threshold: 1e-6 }
    }
}

impl ConvexityGrid {
    /// Reduced grid for quick runs.
    pub fn quick() -> Self {
        Self { n_meridian: 48, n_azimuth: 16, n_ray: 200, n_chord: 10, hessian_threshold: 1e-6 }
    }
}

/// A witness for a failed convexity sub-check.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityFailure {
    pub check: &'static str,
    pub detail: String,
}

/// Result of the strong null-convexity certification.
///
/// The chord-connectivity check is a sampled necessary condition for the
/// embedding property of the region's space of null geodesics, not a proof of
/// it; the gap is recorded here rather than silently ignored.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub hessian_min_abs: f64,
    pub hessian_witness: Option<[f64; 3]>,
    pub hessian_threshold: f64,
    pub unique_tangency_ok: bool,
    pub chord_connected_ok: bool,
    pub samples: usize,
    pub failures: Vec<ConvexityFailure>,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.hessian_min_abs > self.hessian_threshold
            && self.unique_tangency_ok
            && self.chord_connected_ok
    }
}

/// Boundary samples (with evaluations) for a region, covering the meridian
/// and azimuth directions.
fn boundary_samples(region: &Region, grid: &ConvexityGrid) -> Result<Vec<(Event, HEval)>> {
    let mut out = Vec::new();
    match region {
        Region::Revolution(p) => {
            let (t0, t1) = (p.t_min(), p.t_max());
            for i in 0..grid.n_meridian {
                // interior samples only; the poles have degenerate azimuth
                let t = t0 + (t1 - t0) * (i as f64 + 0.5) / grid.n_meridian as f64;
                let r = p.radius(t);
                for j in 0..grid.n_azimuth {
                    let phi = std::f64::consts::TAU * j as f64 / grid.n_azimuth as f64;
                    let u = unit_dir(phi);
                    let ev = Event::new(t, r * u[0], r * u[1]);
                    out.push((ev, region.eval(ev)?));
                }
            }
        }
        _ => {
            let center = region.interior_point();
            for i in 0..grid.n_meridian {
                let psi = std::f64::consts::PI * (i as f64 + 0.5) / grid.n_meridian as f64;
                for j in 0..grid.n_azimuth {
                    let phi = std::f64::consts::TAU * j as f64 / grid.n_azimuth as f64;
                    let u = unit_dir(phi);
                    let dir = TangentVec::new(psi.cos(), psi.sin() * u[0], psi.sin() * u[1]);
                    let ev = boundary_point_by_shooting(region, center, dir)?;
                    out.push((ev, region.eval(ev)?));
                }
            }
        }
    }
    Ok(out)
}

/// Run the strong null-convexity certification of a region.
///
/// (a) Hessian test: minimum of `|Hess H(v, v)|` over boundary null tangents,
///     refined locally around the sampled minimum.
/// (b) Unique tangency: `H` along every sampled boundary-tangent null ray
///     stays non-positive and is near zero only near the tangency parameter.
/// (c) Chord connectivity: for a grid of rays meeting the region,
///     `{s : H > 0}` is a single interval (exactly two sign changes).
pub fn check_strong_null_convexity(region: &Region, grid: &ConvexityGrid) -> Result<ConvexityReport> {
    let scale = region.h_scale();
    let mut failures = Vec::new();
    // a region whose boundary cannot even be sampled fails certification
    // with a diagnostic; chord connectivity still runs below
    let samples = match boundary_samples(region, grid) {
        Ok(s) => s,
        Err(e) => {
            failures.push(ConvexityFailure {
                check: "sampling",
                detail: format!("boundary sampling failed: {e}"),
            });
            Vec::new()
        }
    };

    // (a) Hessian on null tangents
    let mut hess_min = f64::INFINITY;
    let mut witness: Option<[f64; 3]> = None;
    for (ev, e) in &samples {
        let bp = classify_from_eval(*ev, e)?;
        for v in &bp.null_dirs {
            let q = quadratic_form_pair(&e.hess, *v, *v).abs();
            if q < hess_min {
                hess_min = q;
                witness = Some(ev.as_array());
            }
        }
    }
    // local refinement around the sampled minimum
    if let (Some(w), Region::Revolution(p)) = (witness, region) {
        let mut center = w[0];
        let mut width = 2.0 * (p.t_max() - p.t_min()) / grid.n_meridian as f64;
        for _ in 0..6 {
            let mut best = (hess_min, center);
            for k in 0..=32 {
                let t = center - width + 2.0 * width * k as f64 / 32.0;
                if t <= p.t_min() || t >= p.t_max() {
                    continue;
                }
                let r = p.radius(t);
                let ev = Event::new(t, r, 0.0);
                let e = region.eval(ev)?;
                let bp = classify_from_eval(ev, &e)?;
                for v in &bp.null_dirs {
                    let q = quadratic_form_pair(&e.hess, *v, *v).abs();
                    if q < best.0 {
                        best = (q, t);
                        witness = Some(ev.as_array());
                    }
                }
            }
            hess_min = best.0;
            center = best.1;
            width /= 8.0;
        }
    }
    if samples.is_empty() {
        hess_min = 0.0;
    }
    if hess_min <= grid.hessian_threshold {
        failures.push(ConvexityFailure {
            check: "hessian",
            detail: format!(
                "min |Hess H(v,v)| = {hess_min:.3e} at {:?}",
                witness.unwrap_or_default()
            ),
        });
    }

    // (b) unique tangency along boundary-tangent rays
    let mut unique_ok = !samples.is_empty();
    let stride = (samples.len() / 512).max(1);
    for (ev, e) in samples.iter().step_by(stride) {
        let bp = classify_from_eval(*ev, e)?;
        for v in &bp.null_dirs {
            let Ok(ray) = chart_of_geodesic(*ev, *v) else { continue };
            let Some((lo, hi)) = scan_window(region, &ray) else { continue };
            let s_tangent = ev.t;
            let loc_radius = 0.05 * (hi - lo);
            let mut max_h = f64::NEG_INFINITY;
            let mut stray: Option<f64> = None;
            for k in 0..=grid.n_ray {
                let s = lo + (hi - lo) * k as f64 / grid.n_ray as f64;
                let h = region.value(ray.at(s)).unwrap_or(-1.0);
                max_h = max_h.max(h);
                if h > -1e-6 * scale && (s - s_tangent).abs() > loc_radius {
                    stray.get_or_insert(s);
                }
            }
            if max_h > 1e-7 * scale || stray.is_some() {
                unique_ok = false;
                failures.push(ConvexityFailure {
                    check: "unique_tangency",
                    detail: format!(
                        "tangent ray at ({:.4}, {:.4}, {:.4}) has max H = {max_h:.3e}{}",
                        ev.t,
                        ev.x,
                        ev.y,
                        stray
                            .map(|s| format!(", near-zero H at parameter {s:.4}"))
                            .unwrap_or_default()
                    ),
                });
            }
        }
    }

    // (c) chord connectivity over a deterministic ray grid
    let mut chord_ok = true;
    let bbox = region.bbox();
    let cx = 0.5 * (bbox.min[1] + bbox.max[1]);
    let cy = 0.5 * (bbox.min[2] + bbox.max[2]);
    let rx = 0.5 * (bbox.max[1] - bbox.min[1]);
    let ry = 0.5 * (bbox.max[2] - bbox.min[2]);
    let mut hits = 0usize;
    for a in 0..grid.n_chord {
        let theta = std::f64::consts::TAU * a as f64 / grid.n_chord as f64;
        for i in 0..grid.n_chord {
            for j in 0..grid.n_chord {
                let q = [
                    cx + rx * (2.0 * (i as f64 + 0.5) / grid.n_chord as f64 - 1.0),
                    cy + ry * (2.0 * (j as f64 + 0.5) / grid.n_chord as f64 - 1.0),
                ];
                let ray = NullRay::new(q, theta);
                let Some((lo, hi)) = scan_window(region, &ray) else { continue };
                let mut crossings = 0usize;
                let mut prev = region.value(ray.at(lo)).unwrap_or(-1.0);
               let mut entered = false;
                for k in 1..=grid.n_ray {
                    let s = lo + (hi - lo) * k as f64 / grid.n_ray as f64;
                    let h = region.value(ray.at(s)).unwrap_or(-1.0);
                    if prev * h < 0.0 {
                        crossings += 1;
                    }
                    if h > 0.0 {
                        entered = true;
                    }
                    if h != 0.0 {
                        prev = h;
                    }
                }
                if entered {
                    hits += 1;
                }
                if crossings > 2 {
                    chord_ok = false;
                    failures.push(ConvexityFailure {
                        check: "chord_connectivity",
                        detail: format!(
                            "ray q = ({:.3}, {:.3}), theta = {theta:.3} crosses the boundary {crossings} times",
                            q[0], q[1]
                        ),
                    });
                }
            }
        }
    }
    if hits == 0 {
        chord_ok = false;
        failures.push(ConvexityFailure {
            check: "chord_connectivity",
            detail: "no ray in the grid met the region".to_string(),
        });
    }

    Ok(ConvexityReport {
        hessian_min_abs: hess_min,
        hessian_witness: witness,
        hessian_threshold: grid.hessian_threshold,
        unique_tangency_ok: unique_ok,
        chord_connected_ok: chord_ok,
        samples: samples.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::two_ball_union_region;

    fn unit_ball() -> Region {
        Region::revolution(Profile::ellipsoid(1.0, 1.0).unwrap())
    }

    #[test]
    fn classify_examples() {
        let b = unit_ball();
        let p = classify_boundary_point(&b, Event::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(p.class, SurfaceClass::TimelikePart);
        assert_eq!(p.null_dirs.len(), 2);

        let s = 1.0 / 2.0_f64.sqrt();
        let p = classify_boundary_point(&b, Event::new(s, s, 0.0)).unwrap();
        assert_eq!(p.class, SurfaceClass::LightlikePart);
        assert_eq!(p.null_dirs.len(), 1);

        let r = 0.19_f64.sqrt();
        let p = classify_boundary_point(&b, Event::new(0.9, r, 0.0)).unwrap();
        assert_eq!(p.class, SurfaceClass::SpacelikePart);
        assert!(p.null_dirs.is_empty());
    }

    #[test]
    fn classify_rejects_off_boundary() {
        let b = unit_ball();
        let r = classify_boundary_point(&b, Event::new(0.0, 0.5, 0.0));
        assert!(matches!(r, Err(BoundaryError::NotOnBoundary(_))));
    }

    #[test]
    fn null_dirs_examples() {
        let b = unit_ball();
        // equator: tangent plane spanned by dt, dy
        let dirs = null_tangent_directions(&b, Event::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(dirs.len(), 2);
        let plus = dirs[0];
        assert!((plus.x - 0.0).abs() < 1e-12 && (plus.y - 1.0).abs() < 1e-12, "{plus:?}");
        let minus = dirs[1];
        assert!((minus.y + 1.0).abs() < 1e-12);

        // upper latitude: unique direction with spatial part -u(0)
        let s = 1.0 / 2.0_f64.sqrt();
        let dirs = null_tangent_directions(&b, Event::new(s, s, 0.0)).unwrap();
        assert_eq!(dirs.len(), 1);
        assert!((dirs[0].x + 1.0).abs() < 1e-7, "{:?}", dirs[0]);
        assert!(dirs[0].y.abs() < 1e-7);

        // spacelike cap: no null tangents
        let dirs = null_tangent_directions(&b, Event::new(0.9, 0.19_f64.sqrt(), 0.0)).unwrap();
        assert!(dirs.is_empty());
    }

    #[test]
    fn null_dirs_are_null_and_tangent() {
        let b = Region::revolution(Profile::ellipsoid(1.0, 2.0).unwrap());
        let prof = b.profile().unwrap().clone();
        let (lo, hi) = prof.latitudes();
        for i in 0..40 {
            let t = lo + (hi - lo) * (i as f64 + 0.5) / 40.0;
            let r = prof.radius(t);
            for phi in [0.0, 1.1, 2.9, 4.5] {
                let u = unit_dir(phi);
                let ev = Event::new(t, r * u[0], r * u[1]);
                let e = b.eval(ev).unwrap();
                for v in null_tangent_directions(&b, ev).unwrap() {
                    let q = crate::geometry::eta(v, v);
                    assert!(q.abs() < 1e-12, "eta(v,v) = {q}");
                    let dh = e.grad.t * v.t + e.grad.x * v.x + e.grad.y * v.y;
                    assert!(dh.abs() < 1e-10, "dH(v) = {dh}");
                }
            }
        }
    }

    #[test]
    fn revolution_null_dirs_match_closed_form() {
        // spatial parts are r' u(phi) +- sqrt(1 - r'^2) u(phi)^perp
        let b = Region::revolution(Profile::ellipsoid(1.0, 2.0).unwrap());
        let prof = b.profile().unwrap().clone();
        let t = 0.21;
        let phi = 1.3_f64;
        let (r, rp) = (prof.radius(t), prof.dradius(t));
        let u = unit_dir(phi);
        let up = rot90(u);
        let beta = (1.0 - rp * rp).sqrt();
        let ev = Event::new(t, r * u[0], r * u[1]);
        let dirs = null_tangent_directions(&b, ev).unwrap();
        let want_plus = [rp * u[0] + beta * up[0], rp * u[1] + beta * up[1]];
        assert!((dirs[0].x - want_plus[0]).abs() < 1e-12);
        assert!((dirs[0].y - want_plus[1]).abs() < 1e-12);
        let want_minus = [rp * u[0] - beta * up[0], rp * u[1] - beta * up[1]];
        assert!((dirs[1].x - want_minus[0]).abs() < 1e-12);
        assert!((dirs[1].y - want_minus[1]).abs() < 1e-12);
        // plus branch is counterclockwise of the outward normal
        assert!(cross2(u, [dirs[0].x, dirs[0].y]) > 0.0);
    }

    #[test]
    fn latitude_examples() {
        let p = Profile::ellipsoid(1.0, 1.0).unwrap();
        let (lo, hi) = lightlike_latitudes(&p);
        let w = 1.0 / 2.0_f64.sqrt();
        assert!((lo + w).abs() < 1e-10 && (hi - w).abs() < 1e-10);

        let p = Profile::ellipsoid(2.0, 2.0).unwrap();
        let (lo, hi) = lightlike_latitudes(&p);
        assert!((hi - 2.0_f64.sqrt()).abs() < 1e-10, "{hi}");
        assert!((lo + 2.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn tangency_examples() {
        let b = unit_ball();
        // tangent ray at the equator
        let ray = NullRay::new([1.0, 0.0], std::f64::consts::FRAC_PI_2);
        let (ev, g) = tangency_point(&b, &ray).unwrap();
        assert!(g.abs() < 1e-12, "G = {g}");
        assert!(ev.t.abs() < 1e-6 && (ev.x - 1.0).abs() < 1e-6);

        // central chord
        let ray = NullRay::new([0.0, 0.0], 0.0);
        let (ev, g) = tangency_point(&b, &ray).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!(ev.t.abs() < 1e-9 && ev.x.abs() < 1e-9);

        // missing ray
        let ray = NullRay::new([3.0, 0.0], std::f64::consts::FRAC_PI_2);
        let (_, g) = tangency_point(&b, &ray).unwrap();
        assert!(g < 0.0);
    }

    #[test]
    fn tangency_no_bracket_for_implicit_miss() {
        // implicit regions cannot be evaluated outside their box, so a ray
        // missing the box has no scan window
        let union = two_ball_union_region();
        let ray = NullRay::new([0.0, 50.0], 0.0);
        assert!(matches!(tangency_point(&union, &ray), Err(BoundaryError::NoBracket)));
    }

    #[test]
    fn ball_convexity_passes_with_hessian_four() {
        let rep = check_strong_null_convexity(&unit_ball(), &ConvexityGrid::default()).unwrap();
        assert!(rep.passed(), "failures: {:?}", rep.failures);
        assert!((rep.hessian_min_abs - 4.0).abs() < 1e-9, "{}", rep.hessian_min_abs);
    }

    #[test]
    fn quartic_profile_flagged_at_origin() {
        let t_end = ((1.0 + 5.0_f64.sqrt()) / 2.0).sqrt();
        let p = Profile::from_poly(vec![1.0, 0.0, 1.0, 0.0, -1.0], -t_end, t_end).unwrap();
        let rep =
            check_strong_null_convexity(&Region::revolution(p), &ConvexityGrid::default()).unwrap();
        assert!(!rep.passed());
        assert!(rep.hessian_min_abs <= 1e-6, "min = {}", rep.hessian_min_abs);
        let w = rep.hessian_witness.unwrap();
        assert!(w[0].abs() < 1e-3, "witness latitude {}", w[0]);
    }

    #[test]
    fn union_region_fails_chord_connectivity() {
        let rep =
            check_strong_null_convexity(&two_ball_union_region(), &ConvexityGrid::quick()).unwrap();
        assert!(!rep.chord_connected_ok);
        assert!(!rep.passed());
    }

    #[test]
    fn boosted_ball_still_passes() {
        let map = crate::geometry::ConformalMap::boost(0.5, [1.0, 0.0]).unwrap();
        let region = Region::transformed(unit_ball(), map);
        let rep = check_strong_null_convexity(&region, &ConvexityGrid::quick()).unwrap();
        assert!(rep.passed(), "failures: {:?}", rep.failures);
        // |Hess(v,v)| = 4 w_t^2 with w_t in [e^-chi, e^chi]
        assert!(rep.hessian_min_abs > 4.0 * (-1.0_f64).exp() * 0.9);
    }

    #[test]
    fn tangency_sign_is_conformally_natural() {
        let maps = [
            crate::geometry::ConformalMap::boost(0.4, [0.0, 1.0]).unwrap(),
            crate::geometry::ConformalMap::translation(0.2, -0.3, 0.5),
            crate::geometry::ConformalMap::dilation(2.5).unwrap(),
        ];
        let ball = unit_ball();
        let rays = [
            NullRay::new([0.3, 0.1], 0.7),
            NullRay::new([1.0, 0.0], std::f64::consts::FRAC_PI_2),
            NullRay::new([2.5, 0.4], 1.9),
        ];
        for m in &maps {
            let image = Region::transformed(unit_ball(), m.clone());
            for ray in &rays {
                let (_, g0) = tangency_point(&ball, ray).unwrap();
                let mapped = crate::geometry::apply_conformal_ray(m, ray);
                let (_, g1) = tangency_point(&image, &mapped).unwrap();
                assert_eq!(g0 > 1e-9, g1 > 1e-9, "G sign changed: {g0} vs {g1}");
                assert_eq!(g0 < -1e-9, g1 < -1e-9);
            }
        }
    }
}
