//! Leaves of the characteristic foliation.
//!
//! For revolution regions the leaf is the scalar ODE
//! `dphi/dt = s sqrt(4 rho - rho'^2) / (2 rho)` integrated between the
//! lightlike latitudes; the lifted time function is the parameter itself, so
//! its monotonicity is structural. For other regions the projected lightlike
//! curve is traced in the ambient space by arclength with a Newton projection
//! back to the boundary after every step, and time monotonicity is asserted.

use crate::geometry::{chart_of_geodesic, unit_dir, Event, TangentVec};
use crate::numerics::{ode_integrate, rk45_step, Tolerance};
use crate::region::Region;

use super::torus::{leaf_dphi_dt, revolution_torus_point, Branch, TorusPoint};
use super::{FoliationError, Result};

/// How a computed leaf ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafEnd {
    HitLowerSingular,
    HitUpperSingular,
    Budget,
}

/// A leaf sampled at the integrator's accepted steps. The lifted time
/// function is strictly monotone along the list (increasing for leaves traced
/// toward the upper circle).
#[derive(Debug, Clone)]
pub struct Leaf {
    pub points: Vec<TorusPoint>,
    pub end: LeafEnd,
}

impl Leaf {
    /// Total (signed, unwrapped) azimuth change along the leaf.
    pub fn delta_phi(&self) -> f64 {
        self.points.last().map(|p| p.phi).unwrap_or(0.0)
            - self.points.first().map(|p| p.phi).unwrap_or(0.0)
    }
}

/// Integrate the leaf through `start` forward in time, to the upper singular
/// circle.
pub fn integrate_leaf(region: &Region, start: &TorusPoint, tol: &Tolerance) -> Result<Leaf> {
    integrate_leaf_dir(region, start, tol, true)
}

/// Integrate the leaf through `start` toward the upper (`forward`) or lower
/// singular circle.
pub fn integrate_leaf_dir(
    region: &Region,
    start: &TorusPoint,
    tol: &Tolerance,
    forward: bool,
) -> Result<Leaf> {
    match region {
        Region::Revolution(profile) => {
            let (lat_lo, lat_hi) = profile.latitudes();
            let target = if forward { lat_hi } else { lat_lo };
            if (start.t - target).abs() < 1e-15 {
                return Ok(Leaf {
                    points: vec![start.clone()],
                    end: if forward { LeafEnd::HitUpperSingular } else { LeafEnd::HitLowerSingular },
                });
            }
            let branch = start.branch;
            let prof = profile.clone();
            let rhs = move |t: f64, _y: &[f64], dy: &mut [f64]| {
                dy[0] = leaf_dphi_dt(&prof, t, branch);
            };
            let traj = ode_integrate(rhs, &[start.phi], start.t, target, &[], tol)
                .map_err(|e| match e {
                    crate::numerics::NumericsError::Budget { context, .. } => {
                        FoliationError::Budget(context)
                    }
                    other => FoliationError::Numerics(other),
                })?;
            let points = traj
                .times
                .iter()
                .zip(&traj.states)
                .map(|(&t, y)| {
                    let mut p = revolution_torus_point(profile, t, y[0], branch);
                    p.phi = y[0]; // keep the unwrapped azimuth
                    p
                })
                .collect();
            Ok(Leaf {
                points,
                end: if forward { LeafEnd::HitUpperSingular } else { LeafEnd::HitLowerSingular },
            })
        }
        Region::Diamond => {
            // leaves are the theta-fiber segments at fixed q between the two
            // singular circles; the azimuth is constant along them
            let steps = 33;
            let phi = start.phi;
            let (from, to) = if forward { (0.0, 1.0) } else { (1.0, 0.0) };
            let points = (0..steps)
                .map(|k| {
                    let m = from + (to - from) * k as f64 / (steps - 1) as f64;
                    let offset = match start.branch {
                        Branch::Plus => 0.0,
                        Branch::Minus => std::f64::consts::PI,
                    };
                    let theta = phi + offset + m * std::f64::consts::PI;
                    let u = unit_dir(phi);
                    let d = unit_dir(theta);
                    TorusPoint {
                        t: 0.0,
                        phi,
                        branch: start.branch,
                        chart: crate::geometry::NullRay::new(u, theta),
                        time_t: 0.0,
                        event: Event::new(0.0, u[0], u[1]),
                        null_dir: TangentVec::new(1.0, d[0], d[1]),
                    }
                })
                .collect();
            Ok(Leaf {
                points,
                end: if forward { LeafEnd::HitUpperSingular } else { LeafEnd::HitLowerSingular },
            })
        }
        _ => {
            let ambient = trace_ambient_leaf(
                region,
                start.event,
                start.branch,
                forward,
                tol,
            )?;
            Ok(ambient.into_leaf(start.branch, forward))
        }
    }
}

/// A leaf traced in the ambient space.
#[derive(Debug, Clone)]
pub struct AmbientLeaf {
    /// Accepted points with their selected null directions.
    pub points: Vec<(Event, TangentVec)>,
    /// Unwrapped azimuth (about the spatial origin of the region frame) at
    /// each accepted point.
    pub azimuths: Vec<f64>,
    pub budget_exhausted: bool,
}

impl AmbientLeaf {
    pub fn end_event(&self) -> Event {
        self.points.last().expect("ambient leaf is never empty").0
    }

    pub fn delta_azimuth(&self) -> f64 {
        self.azimuths.last().unwrap_or(&0.0) - self.azimuths.first().unwrap_or(&0.0)
    }

    fn into_leaf(self, branch: Branch, forward: bool) -> Leaf {
        let points = self
            .points
            .iter()
            .zip(&self.azimuths)
            .map(|(&(event, dir), &phi)| TorusPoint {
                t: event.t,
                phi,
                branch,
                chart: chart_of_geodesic(event, dir)
                    .expect("traced directions are future null"),
                time_t: event.t,
                event,
                null_dir: dir,
            })
            .collect();
        let end = if self.budget_exhausted {
            LeafEnd::Budget
        } else if forward {
            LeafEnd::HitUpperSingular
        } else {
            LeafEnd::HitLowerSingular
        };
        Leaf { points, end }
    }
}

/// Select the spatial null direction of the given branch from the gradient,
/// with the square root clamped so the field extends continuously past the
/// lightlike circles (used only to bracket the terminal event).
fn branch_dir(grad: TangentVec, branch: Branch) -> [f64; 2] {
    let gs = grad.spatial();
    let gnorm = (gs[0] * gs[0] + gs[1] * gs[1]).sqrt().max(1e-300);
    let ghat = [gs[0] / gnorm, gs[1] / gnorm];
    let alpha = (-grad.t / gnorm).clamp(-1.0, 1.0);
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    // plus branch: counterclockwise of the outward normal -ghat
    let s = -branch.sign();
    [
        alpha * ghat[0] + s * beta * (-ghat[1]),
        alpha * ghat[1] + s * beta * ghat[0],
    ]
}

/// Trace the lightlike curve of the given branch through `start` on the
/// region boundary, by arclength, until the lightlike circle is reached
/// (`forward` selects the time direction). Each accepted step is projected
/// back to `H = 0` by Newton steps along the gradient.
pub fn trace_ambient_leaf(
    region: &Region,
    start: Event,
    branch: Branch,
    forward: bool,
    tol: &Tolerance,
) -> Result<AmbientLeaf> {
    let scale = region.h_scale();
    let time_sign = if forward { 1.0 } else { -1.0 };

    let rhs = |_s: f64, y: &[f64], dy: &mut [f64]| {
        let p = Event::new(y[0], y[1], y[2]);
        let grad = match region.eval(p) {
            Ok(e) => e.grad,
            Err(_) => TangentVec::new(f64::NAN, f64::NAN, f64::NAN),
        };
        let d = branch_dir(grad, branch);
        let norm = (1.0 + d[0] * d[0] + d[1] * d[1]).sqrt();
        dy[0] = time_sign / norm;
        dy[1] = time_sign * d[0] / norm;
        dy[2] = time_sign * d[1] / norm;
    };

    let project = |y: &mut [f64]| -> Result<()> {
        for _ in 0..3 {
            let p = Event::new(y[0], y[1], y[2]);
            let e = region.eval(p)?;
            let g2 = e.grad.t * e.grad.t + e.grad.x * e.grad.x + e.grad.y * e.grad.y;
            if g2 < 1e-30 {
                return Err(FoliationError::LostSurface(
                    "projection gradient vanished".to_string(),
                ));
            }
            let f = e.h / g2;
            y[0] -= f * e.grad.t;
            y[1] -= f * e.grad.x;
            y[2] -= f * e.grad.y;
            if (e.h / scale).abs() < 1e-12 {
                break;
            }
        }
        let h = region.value(Event::new(y[0], y[1], y[2]))?;
        if (h / scale).abs() > 1e-10 {
            return Err(FoliationError::LostSurface(format!(
                "projection stalled at |H|/scale = {:.3e}",
                (h / scale).abs()
            )));
        }
        Ok(())
    };

    // degeneracy indicator: positive on the timelike band, zero on the
    // lightlike circles, negative on the spacelike caps
    let band_gap = |y: &[f64]| -> Result<f64> {
        let e = region.eval(Event::new(y[0], y[1], y[2]))?;
        Ok(crate::boundary::gradient_eta_norm(e.grad))
    };

    // nudge off the start point (it may sit on a singular circle, where the
    // branch field is degenerate), then integrate with adaptive steps
    let mut y = [start.t, start.x, start.y];
    project(&mut y)?;
    let diag = region.bbox().diagonal();
    let nudge = 1e-5 * diag;
    {
        let mut dy = [0.0; 3];
        rhs(0.0, &y, &mut dy);
        for i in 0..3 {
            y[i] += nudge * dy[i];
        }
        project(&mut y)?;
    }

    let grad0 = region.eval(Event::new(y[0], y[1], y[2]))?.grad;
    let arm_level = 1e-4 * (grad0.x * grad0.x + grad0.y * grad0.y + grad0.t * grad0.t);

    let center_sp = [0.0, 0.0];
    let azimuth_of = |y: &[f64]| (y[2] - center_sp[1]).atan2(y[1] - center_sp[0]);

    let mut points: Vec<(Event, TangentVec)> = Vec::new();
    let mut azimuths: Vec<f64> = Vec::new();
    let mut push_point = |y: &[f64], azimuths: &mut Vec<f64>, points: &mut Vec<(Event, TangentVec)>| {
        let p = Event::new(y[0], y[1], y[2]);
        let grad = region.eval(p).map(|e| e.grad).unwrap_or(TangentVec::ZERO);
        let d = branch_dir(grad, branch);
        let raw = azimuth_of(y);
        let unwrapped = match azimuths.last() {
            Some(prev) => prev + crate::geometry::angle_diff(raw, *prev),
            None => raw,
        };
        azimuths.push(unwrapped);
        points.push((p, TangentVec::new(1.0, d[0], d[1])));
    };
    push_point(&y, &mut azimuths, &mut points);

    let mut armed = false;
    let mut g_prev = band_gap(&y)?;
    let mut h = 1e-3 * diag;
    let h_min = 1e-14 * diag;

    for _step in 0..tol.max_steps {
        let (y_trial, err) = rk45_step(&rhs, 0.0, &y, h).map_err(FoliationError::Numerics)?;
        let mut y_new = [y_trial[0], y_trial[1], y_trial[2]];
        let en = {
            let mut acc = 0.0;
            for i in 0..3 {
                let sc = tol.abs_tol + tol.rel_tol * y[i].abs().max(y_new[i].abs());
                acc += (err[i] / sc) * (err[i] / sc);
            }
            (acc / 3.0).sqrt()
        };
        if !en.is_finite() || en > 1.0 || project(&mut y_new).is_err() {
            h *= 0.5;
            if h < h_min {
                return Err(FoliationError::LostSurface(format!(
                    "step size collapsed at t = {:.6e}",
                    y[0]
                )));
            }
            continue;
        }

        let g_new = band_gap(&y_new)?;
        if armed && g_prev > 0.0 && g_new <= 0.0 {
            // bisect the crossing on the step fraction
            let mut lo = 0.0;
            let mut hi = 1.0;
            let mut y_hit = y_new;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (ym, _) = rk45_step(&rhs, 0.0, &y, mid * h).map_err(FoliationError::Numerics)?;
                let mut ym = [ym[0], ym[1], ym[2]];
                if project(&mut ym).is_err() {
                    hi = mid;
                    continue;
                }
                let gm = band_gap(&ym)?;
                if gm > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    y_hit = ym;
                }
                if (hi - lo) * h.abs() < tol.abs_tol {
                    break;
                }
            }
            push_point(&y_hit, &mut azimuths, &mut points);
            return Ok(AmbientLeaf { points, azimuths, budget_exhausted: false });
        }
        if g_new > arm_level {
            armed = true;
        }

        // time must be strictly monotone in the trace direction
        if (y_new[0] - y[0]) * time_sign <= 0.0 {
            return Err(FoliationError::LostSurface(format!(
                "time stopped being monotone at t = {:.6e}",
                y[0]
            )));
        }

        y = y_new;
        g_prev = g_new;
        push_point(&y, &mut azimuths, &mut points);
        h = (h * 1.3).min(2e-2 * diag);
    }
    Ok(AmbientLeaf { points, azimuths, budget_exhausted: true })
}

/// Check that the lifted time function is strictly monotone along a leaf.
pub fn time_strictly_monotone(leaf: &Leaf) -> bool {
    if leaf.points.len() < 2 {
        return true;
    }
    let increasing = leaf.points[1].time_t > leaf.points[0].time_t;
    leaf.points.windows(2).all(|w| {
        if increasing {
            w[1].time_t > w[0].time_t
        } else {
            w[1].time_t < w[0].time_t
        }
    })
}

/// Check that a leaf never revisits its start (no closed leaves).
pub fn never_revisits_start(leaf: &Leaf, tol: f64) -> bool {
    let Some(first) = leaf.points.first() else { return true };
    leaf.points.iter().skip(1).all(|p| {
        let dq = [
            p.chart.q[0] - first.chart.q[0],
            p.chart.q[1] - first.chart.q[1],
        ];
        let dth = crate::geometry::angle_diff(p.chart.theta, first.chart.theta);
        (dq[0] * dq[0] + dq[1] * dq[1]).sqrt() + dth.abs() > tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Profile;
    use std::f64::consts::PI;

    fn ball_region() -> Region {
        Region::revolution(Profile::ellipsoid(1.0, 1.0).unwrap())
    }

    fn tol() -> Tolerance {
        Tolerance { abs_tol: 1e-11, rel_tol: 1e-10, max_steps: 200_000 }
    }

    #[test]
    fn ball_leaf_accumulates_closed_form_angle() {
        // integral of sqrt(1 - 2 t^2)/(1 - t^2) over the band: pi (sqrt(2)-1)
        let region = ball_region();
        let prof = region.profile().unwrap();
        let (lo, _) = prof.latitudes();
        let start = revolution_torus_point(prof, lo, 0.0, Branch::Plus);
        let leaf = integrate_leaf(&region, &start, &tol()).unwrap();
        assert_eq!(leaf.end, LeafEnd::HitUpperSingular);
        let want = PI * (2.0_f64.sqrt() - 1.0);
        assert!((leaf.delta_phi() - want).abs() < 1e-7, "got {}", leaf.delta_phi());
    }

    #[test]
    fn ball_leaf_rate_at_equator() {
        let prof = Profile::ellipsoid(1.0, 1.0).unwrap();
        assert!((leaf_dphi_dt(&prof, 0.0, Branch::Plus) - 1.0).abs() < 1e-12);
        assert!((leaf_dphi_dt(&prof, 0.0, Branch::Minus) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaf_time_is_monotone_and_open() {
        let region = ball_region();
        let prof = region.profile().unwrap();
        let (lo, hi) = prof.latitudes();
        for branch in [Branch::Plus, Branch::Minus] {
            let start = revolution_torus_point(prof, lo + 0.1 * (hi - lo), 1.3, branch);
            let leaf = integrate_leaf(&region, &start, &tol()).unwrap();
            assert!(time_strictly_monotone(&leaf));
            assert!(never_revisits_start(&leaf, 1e-9));
        }
    }

    #[test]
    fn backward_leaf_hits_lower_circle() {
        let region = ball_region();
        let prof = region.profile().unwrap();
        let (lo, hi) = prof.latitudes();
        let start = revolution_torus_point(prof, 0.3 * (hi - lo) + lo, 0.0, Branch::Minus);
        let leaf = integrate_leaf_dir(&region, &start, &tol(), false).unwrap();
        assert_eq!(leaf.end, LeafEnd::HitLowerSingular);
        let last = leaf.points.last().unwrap();
        assert!((last.t - lo).abs() < 1e-9);
    }

    #[test]
    fn ambient_trace_matches_scalar_on_the_ball() {
        // force the ambient tracer through an identity transform
        let region = Region::transformed(ball_region(), crate::geometry::ConformalMap::identity());
        let prof = Profile::ellipsoid(1.0, 1.0).unwrap();
        let (lo, _) = prof.latitudes();
        let start = revolution_torus_point(&prof, lo, 0.0, Branch::Plus);
        let ambient = trace_ambient_leaf(&region, start.event, Branch::Plus, true, &tol()).unwrap();
        assert!(!ambient.budget_exhausted);
        let want = PI * (2.0_f64.sqrt() - 1.0);
        let got = ambient.delta_azimuth();
        assert!((got - want).abs() < 1e-5, "ambient delta = {got}, want {want}");
        // endpoint reaches the upper circle
        let end = ambient.end_event();
        assert!((end.t - 1.0 / 2.0_f64.sqrt()).abs() < 1e-5, "end t = {}", end.t);
    }

    #[test]
    fn diamond_leaves_are_fibers() {
        let region = Region::Diamond;
        let start = TorusPoint {
            t: 0.0,
            phi: 1.0,
            branch: Branch::Plus,
            chart: crate::geometry::NullRay::new(unit_dir(1.0), 1.0),
            time_t: 0.0,
            event: Event::new(0.0, 1.0_f64.cos(), 1.0_f64.sin()),
            null_dir: TangentVec::new(1.0, 1.0_f64.cos(), 1.0_f64.sin()),
        };
        let leaf = integrate_leaf(&region, &start, &tol()).unwrap();
        for p in &leaf.points {
            assert!((p.chart.q[0] - 1.0_f64.cos()).abs() < 1e-14);
            assert!((p.chart.q[1] - 1.0_f64.sin()).abs() < 1e-14);
        }
        assert_eq!(leaf.delta_phi(), 0.0);
    }
}
