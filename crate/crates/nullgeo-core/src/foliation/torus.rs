//! The boundary torus in the chart and its characteristic foliation
//! directions.

use serde::Serialize;

use crate::boundary::{boundary_point_by_shooting, classify_boundary_point, SurfaceClass};
use crate::geometry::{
    angle_diff, cross2, dot2, rot90, unit_dir, wrap_angle, Event, NullRay, TangentVec,
};
use crate::numerics::{find_root, Tolerance};
use crate::region::{Profile, Region};

use super::{FoliationError, Result, SINGULAR_MARGIN};

/// Which of the two null families a torus point belongs to. The plus family
/// is the one whose spatial direction is counterclockwise of the outward
/// spatial normal; branches merge on the singular circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// A point of the boundary torus: a boundary tangency with its chart image.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    /// Tangency time (the lifted time function equals this).
    pub t: f64,
    /// Azimuth on the boundary surface; unwrapped along leaves.
    pub phi: f64,
    pub branch: Branch,
    /// Chart image of the tangent geodesic.
    pub chart: NullRay,
    /// Lifted time function; equals `t`.
    pub time_t: f64,
    /// The tangency event.
    pub event: Event,
    /// The selected null tangent direction (unit time component).
    pub null_dir: TangentVec,
}

/// Sampling resolution of a torus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TorusResolution {
    pub n_meridian: usize,
    pub n_azimuth: usize,
}

impl Default for TorusResolution {
    fn default() -> Self {
        Self { n_meridian: 64, n_azimuth: 64 }
    }
}

/// Closed-form torus point of a revolution region.
///
/// Tangency event `(t, r(t) u(phi))`, null direction
/// `d = r' u(phi) + s sqrt(1 - r'^2) u(phi)^perp`, chart
/// `q = r u(phi) - t d`, `theta = angle(d)`.
pub fn revolution_torus_point(profile: &Profile, t: f64, phi: f64, branch: Branch) -> TorusPoint {
    let r = profile.radius(t);
    let rp = profile.dradius(t);
    let beta = (1.0 - rp * rp).max(0.0).sqrt();
    let s = branch.sign();
    let u = unit_dir(phi);
    let up = rot90(u);
    let d = [rp * u[0] + s * beta * up[0], rp * u[1] + s * beta * up[1]];
    let event = Event::new(t, r * u[0], r * u[1]);
    let q = [r * u[0] - t * d[0], r * u[1] - t * d[1]];
    let theta = wrap_angle(d[1].atan2(d[0]));
    TorusPoint {
        t,
        phi,
        branch,
        chart: NullRay { q, theta },
        time_t: t,
        event,
        null_dir: TangentVec::new(1.0, d[0], d[1]),
    }
}

/// Analytic chart tangent along a leaf of a revolution torus (the
/// sigma-projection of the lightlike curve through the point), as a vector
/// `(dq1, dq2, dtheta)` per unit `dt`.
pub fn revolution_leaf_tangent(profile: &Profile, t: f64, phi: f64, branch: Branch) -> [f64; 3] {
    let (s_t, s_phi) = revolution_tangent_basis(profile, t, phi, branch);
    let dphi_dt = leaf_dphi_dt(profile, t, branch);
    [
        s_t[0] + dphi_dt * s_phi[0],
        s_t[1] + dphi_dt * s_phi[1],
        s_t[2] + dphi_dt * s_phi[2],
    ]
}

/// `dphi/dt` of the lightlike curves on a revolution boundary:
/// `+- sqrt(4 rho - rho'^2) / (2 rho)`.
pub fn leaf_dphi_dt(profile: &Profile, t: f64, branch: Branch) -> f64 {
    branch.sign() * profile.band(t).max(0.0).sqrt() / (2.0 * profile.rho(t))
}

/// Chart tangent basis `(S_t, S_phi)` of a revolution torus sheet.
fn revolution_tangent_basis(
    profile: &Profile,
    t: f64,
    phi: f64,
    branch: Branch,
) -> ([f64; 3], [f64; 3]) {
    let r = profile.radius(t);
    let rp = profile.dradius(t);
    let rpp = (profile.ddrho(t) - 2.0 * rp * rp) / (2.0 * r);
    let beta2 = (1.0 - rp * rp).max(0.0);
    let beta = beta2.sqrt();
    let s = branch.sign();
    let u = unit_dir(phi);
    let up = rot90(u);
    let d = [rp * u[0] + s * beta * up[0], rp * u[1] + s * beta * up[1]];
    // beta' = -r' r'' / beta diverges at the latitudes; callers keep the
    // singular margin
    let betap = -rp * rpp / beta;
    let dd_dt = [rpp * u[0] + s * betap * up[0], rpp * u[1] + s * betap * up[1]];
    let dd_dphi = rot90(d);
    let dq_dt = [rp * u[0] - d[0] - t * dd_dt[0], rp * u[1] - d[1] - t * dd_dt[1]];
    let dtheta_dt = s * (rp * betap - beta * rpp);
    let dq_dphi = [r * up[0] - t * dd_dphi[0], r * up[1] - t * dd_dphi[1]];
    (
        [dq_dt[0], dq_dt[1], dtheta_dt],
        [dq_dphi[0], dq_dphi[1], 1.0],
    )
}

/// Direction of the characteristic foliation at a torus point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FoliationDirection {
    /// A chart tangent vector `(dq1, dq2, dtheta)` spanning `xi ∩ TF`.
    Regular([f64; 3]),
    /// The tangent plane equals the contact plane.
    Singular,
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Solve `lambda(a S_u + b S_v) = 0` for the projective direction, given the
/// contact form value on each basis vector.
fn kernel_direction(
    theta: f64,
    s_u: [f64; 3],
    s_v: [f64; 3],
    m: f64,
    phi: f64,
) -> Result<FoliationDirection> {
    let cr = norm3(cross3(s_u, s_v));
    if cr < 1e-10 * norm3(s_u) * norm3(s_v) {
        return Err(FoliationError::IllConditioned { m, phi });
    }
    let u = unit_dir(theta);
    let lam_u = dot2(u, [s_u[0], s_u[1]]);
    let lam_v = dot2(u, [s_v[0], s_v[1]]);
    let tol = 1e-8 * (norm3(s_u) + norm3(s_v));
    if lam_u.abs() < tol && lam_v.abs() < tol {
        return Ok(FoliationDirection::Singular);
    }
    Ok(FoliationDirection::Regular([
        lam_v * s_u[0] - lam_u * s_v[0],
        lam_v * s_u[1] - lam_u * s_v[1],
        lam_v * s_u[2] - lam_u * s_v[2],
    ]))
}

enum TorusKind {
    Revolution(Profile),
    Diamond,
    /// Boundary sampled by shooting from an interior center; per azimuth the
    /// meridian spans the band between the two singular circles.
    Shooting {
        region: Region,
        center: Event,
        /// Per azimuth sample: `(psi_upper, psi_lower)` polar angles of the
        /// two singular circles seen from the center.
        circle_psis: Vec<(f64, f64)>,
    },
}

/// A sampled boundary torus with evaluators for points, tangent bases and
/// foliation directions. Meridian positions are addressed by the fraction
/// `m` in `[0, 1]` between the lower and the upper singular circle.
pub struct SampledTorus {
    kind: TorusKind,
    pub resolution: TorusResolution,
    /// Grid samples: indexed by sheet (plus, minus), meridian, azimuth.
    pub points: Vec<TorusPoint>,
}

impl SampledTorus {
    pub fn grid_point(&self, branch: Branch, i_meridian: usize, j_azimuth: usize) -> &TorusPoint {
        let sheet = match branch {
            Branch::Plus => 0,
            Branch::Minus => 1,
        };
        let idx = sheet * self.resolution.n_meridian * self.resolution.n_azimuth
            + i_meridian * self.resolution.n_azimuth
            + j_azimuth;
        &self.points[idx]
    }

    /// Meridian fraction of a grid index (samples are cell-centred).
    pub fn meridian_fraction(&self, i_meridian: usize) -> f64 {
        (i_meridian as f64 + 0.5) / self.resolution.n_meridian as f64
    }

    pub fn azimuth(&self, j_azimuth: usize) -> f64 {
        std::f64::consts::TAU * j_azimuth as f64 / self.resolution.n_azimuth as f64
    }

    /// The torus point at continuous parameters.
    pub fn point_at(&self, branch: Branch, m: f64, phi: f64) -> Result<TorusPoint> {
        match &self.kind {
            TorusKind::Revolution(p) => {
                let (lo, hi) = p.latitudes();
                Ok(revolution_torus_point(p, lo + m * (hi - lo), phi, branch))
            }
            TorusKind::Diamond => Ok(diamond_torus_point(phi, m, branch)),
            TorusKind::Shooting { region, center, .. } => {
                shooting_torus_point(region, *center, self, branch, m, phi)
            }
        }
    }

    /// Chart tangent basis `(S_m, S_phi)` at continuous parameters.
    pub fn tangent_basis(&self, branch: Branch, m: f64, phi: f64) -> Result<([f64; 3], [f64; 3])> {
        match &self.kind {
            TorusKind::Revolution(p) => {
                let (lo, hi) = p.latitudes();
                if m < SINGULAR_MARGIN || m > 1.0 - SINGULAR_MARGIN {
                    return Err(FoliationError::IllConditioned { m, phi });
                }
                let t = lo + m * (hi - lo);
                let (s_t, s_phi) = revolution_tangent_basis(p, t, phi, branch);
                let dt = hi - lo;
                Ok(([s_t[0] * dt, s_t[1] * dt, s_t[2] * dt], s_phi))
            }
            TorusKind::Diamond => {
                // embedding (phi, theta) -> (u(phi), theta); meridian is theta
                let up = rot90(unit_dir(phi));
                let s_m = [0.0, 0.0, std::f64::consts::PI];
                let s_phi = [up[0], up[1], 1.0];
                let _ = branch;
                let _ = m;
                Ok((s_m, s_phi))
            }
            TorusKind::Shooting { .. } => {
                // central finite differences of the parametrization
                let hm = 1e-4;
                let hp = 1e-4;
                let m0 = m.clamp(hm, 1.0 - hm);
                let p_mp = self.point_at(branch, m0 + hm, phi)?;
                let p_mm = self.point_at(branch, m0 - hm, phi)?;
                let p_pp = self.point_at(branch, m0, phi + hp)?;
                let p_pm = self.point_at(branch, m0, phi - hp)?;
                let diff = |a: &TorusPoint, b: &TorusPoint, h: f64| {
                    [
                        (a.chart.q[0] - b.chart.q[0]) / (2.0 * h),
                        (a.chart.q[1] - b.chart.q[1]) / (2.0 * h),
                        angle_diff(a.chart.theta, b.chart.theta) / (2.0 * h),
                    ]
                };
                Ok((diff(&p_mp, &p_mm, hm), diff(&p_pp, &p_pm, hp)))
            }
        }
    }

    /// Foliation direction at continuous parameters: the kernel of the
    /// contact form on the tangent plane, or `Singular` when the plane is the
    /// contact plane.
    pub fn foliation_direction(
        &self,
        branch: Branch,
        m: f64,
        phi: f64,
    ) -> Result<FoliationDirection> {
        let pt = self.point_at(branch, m, phi)?;
        let (s_m, s_phi) = self.tangent_basis(branch, m, phi)?;
        kernel_direction(pt.chart.theta, s_m, s_phi, m, phi)
    }

    pub fn region_kind(&self) -> &'static str {
        match &self.kind {
            TorusKind::Revolution(_) => "revolution",
            TorusKind::Diamond => "diamond",
            TorusKind::Shooting { .. } => "shooting",
        }
    }
}

/// Diamond torus point: the ray `(q = u(phi), theta)`, with the meridian
/// fraction sweeping `theta` across the sheet between the singular circles
/// `theta = phi` and `theta = phi + pi`.
fn diamond_torus_point(phi: f64, m: f64, branch: Branch) -> TorusPoint {
    let offset = match branch {
        Branch::Plus => 0.0,
        Branch::Minus => std::f64::consts::PI,
    };
    let theta = wrap_angle(phi + offset + m * std::f64::consts::PI);
    let u = unit_dir(phi);
    let d = unit_dir(theta);
    TorusPoint {
        t: 0.0,
        phi,
        branch,
        chart: NullRay { q: u, theta },
        time_t: 0.0,
        // every boundary ray of the diamond passes through the edge circle
        event: Event::new(0.0, u[0], u[1]),
        null_dir: TangentVec::new(1.0, d[0], d[1]),
    }
}

/// Torus point of a shooting-sampled region: locate the boundary point at
/// polar angle interpolated between the two circles, classify, select the
/// branch direction, and chart the tangent geodesic.
fn shooting_torus_point(
    region: &Region,
    center: Event,
    torus: &SampledTorus,
    branch: Branch,
    m: f64,
    phi: f64,
) -> Result<TorusPoint> {
    let TorusKind::Shooting { circle_psis, .. } = &torus.kind else {
        unreachable!("shooting_torus_point called on a closed-form torus");
    };
    // interpolate circle polar angles periodically in phi
    let n = circle_psis.len();
    let phi_w = wrap_angle(phi);
    let fj = phi_w / std::f64::consts::TAU * n as f64;
    let j0 = (fj.floor() as usize) % n;
    let j1 = (j0 + 1) % n;
    let w = fj - fj.floor();
    let psi_up = circle_psis[j0].0 * (1.0 - w) + circle_psis[j1].0 * w;
    let psi_lo = circle_psis[j0].1 * (1.0 - w) + circle_psis[j1].1 * w;
    // m = 0 at the lower circle, 1 at the upper
    let psi = psi_lo + m * (psi_up - psi_lo);
    let u = unit_dir(phi);
    let dir = TangentVec::new(psi.cos(), psi.sin() * u[0], psi.sin() * u[1]);
    let event = boundary_point_by_shooting(region, center, dir)?;
    let bp = classify_boundary_point(region, event)?;
    let null_dir = match bp.class {
        SurfaceClass::TimelikePart => match branch {
            Branch::Plus => bp.null_dirs[0],
            Branch::Minus => bp.null_dirs[1],
        },
        SurfaceClass::LightlikePart => bp.null_dirs[0],
        SurfaceClass::SpacelikePart => {
            return Err(FoliationError::LostSurface(format!(
                "meridian sample at psi = {psi:.4}, phi = {phi:.4} left the timelike band"
            )))
        }
    };
    let chart = crate::geometry::chart_of_geodesic(event, null_dir)
        .map_err(|e| FoliationError::LostSurface(format!("charting failed: {e}")))?;
    Ok(TorusPoint {
        t: event.t,
        phi,
        branch,
        chart,
        time_t: event.t,
        event,
        null_dir,
    })
}

/// Locate the polar angles (from the `+t` axis at `center`) of the two
/// singular circles at a given azimuth, by a sign sweep of
/// `eta(grad_eta H, grad_eta H)` along the boundary meridian and bracketed
/// root finding.
pub(super) fn circle_polar_angles(region: &Region, center: Event, phi: f64) -> Result<(f64, f64)> {
    let u = unit_dir(phi);
    let g_at = |psi: f64| -> f64 {
        let dir = TangentVec::new(psi.cos(), psi.sin() * u[0], psi.sin() * u[1]);
        match boundary_point_by_shooting(region, center, dir) {
            Ok(ev) => match region.eval(ev) {
                Ok(e) => crate::boundary::gradient_eta_norm(e.grad),
                Err(_) => f64::NAN,
            },
            Err(_) => f64::NAN,
        }
    };
    let n = 96;
    let tol = Tolerance { abs_tol: 1e-13, rel_tol: 1e-13, max_steps: 200 };
    let mut upper: Option<f64> = None;
    let mut lower: Option<f64> = None;
    let mut prev_psi = std::f64::consts::PI * 1e-3;
    let mut prev_g = g_at(prev_psi);
    for k in 1..=n {
        let psi = std::f64::consts::PI * (1e-3 + (1.0 - 2e-3) * k as f64 / n as f64);
        let g = g_at(psi);
        if prev_g.is_finite() && g.is_finite() && prev_g * g < 0.0 {
            let root = find_root(g_at, prev_psi, psi, &tol)
                .map_err(FoliationError::Numerics)?;
            if prev_g < 0.0 {
                // entering the band from the upper cap
                if upper.is_none() {
                    upper = Some(root);
                }
            } else if lower.is_none() {
                lower = Some(root);
            }
        }
        prev_psi = psi;
        prev_g = g;
    }
    match (upper, lower) {
        (Some(u), Some(l)) => Ok((u, l)),
        _ => Err(FoliationError::LostSurface(format!(
            "could not locate both singular circles at azimuth {phi:.4}"
        ))),
    }
}

/// Sample the boundary torus of a region.
///
/// Revolution regions and the diamond use closed forms; other regions are
/// sampled by shooting from an interior center, with the singular circles
/// located first so the meridian spans exactly the band between them. The
/// two branch sheets are sampled at cell-centred meridian fractions.
pub fn boundary_torus(region: &Region, resolution: TorusResolution) -> Result<SampledTorus> {
    let kind = match region {
        Region::Revolution(p) => TorusKind::Revolution(p.clone()),
        Region::Diamond => TorusKind::Diamond,
        _ => {
            let center = region.interior_point();
            let mut circle_psis = Vec::with_capacity(resolution.n_azimuth);
            for j in 0..resolution.n_azimuth {
                let phi = std::f64::consts::TAU * j as f64 / resolution.n_azimuth as f64;
                circle_psis.push(circle_polar_angles(region, center, phi)?);
            }
            TorusKind::Shooting { region: region.clone(), center, circle_psis }
        }
    };
    let mut torus = SampledTorus { kind, resolution, points: Vec::new() };
    let mut points =
        Vec::with_capacity(2 * resolution.n_meridian * resolution.n_azimuth);
    for branch in [Branch::Plus, Branch::Minus] {
        for i in 0..resolution.n_meridian {
            let m = (i as f64 + 0.5) / resolution.n_meridian as f64;
            for j in 0..resolution.n_azimuth {
                let phi = std::f64::consts::TAU * j as f64 / resolution.n_azimuth as f64;
                points.push(torus.point_at(branch, m, phi)?);
            }
        }
    }
    torus.points = points;
    Ok(torus)
}

/// Free-function form of [`SampledTorus::foliation_direction`].
pub fn chart_foliation_direction(
    torus: &SampledTorus,
    branch: Branch,
    m: f64,
    phi: f64,
) -> Result<FoliationDirection> {
    torus.foliation_direction(branch, m, phi)
}

/// Angle between two chart directions regarded as lines (sign-insensitive).
pub fn line_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let na = norm3(a);
    let nb = norm3(b);
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
    dot.abs().min(1.0).acos()
}

/// Normalized transversality of the vector `y` to the plane spanned by the
/// tangent basis: `|det[s_u, s_v, y]| / (|s_u x s_v| |y|)`, in `[0, 1]`.
pub fn plane_transversality(s_u: [f64; 3], s_v: [f64; 3], y: [f64; 3]) -> f64 {
    let n = cross3(s_u, s_v);
    let det = n[0] * y[0] + n[1] * y[1] + n[2] * y[2];
    (det / (norm3(n) * norm3(y))).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball() -> Profile {
        Profile::ellipsoid(1.0, 1.0).unwrap()
    }

    #[test]
    fn ball_torus_equator_plus() {
        let p = revolution_torus_point(&ball(), 0.0, 0.0, Branch::Plus);
        assert!((p.event.t).abs() < 1e-15 && (p.event.x - 1.0).abs() < 1e-15);
        assert!((p.null_dir.x).abs() < 1e-15 && (p.null_dir.y - 1.0).abs() < 1e-15);
        assert!((p.chart.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((p.chart.q[0] - 1.0).abs() < 1e-15 && p.chart.q[1].abs() < 1e-15);
    }

    #[test]
    fn ball_torus_upper_circle() {
        let s = 1.0 / 2.0_f64.sqrt();
        for phi in [0.0, 1.0, 2.5, 5.0] {
            let p = revolution_torus_point(&ball(), s, phi, Branch::Plus);
            let qn = (p.chart.q[0] * p.chart.q[0] + p.chart.q[1] * p.chart.q[1]).sqrt();
            assert!((qn - 2.0_f64.sqrt()).abs() < 1e-9, "|q| = {qn}");
            // d = -u(phi): theta = phi + pi
            assert!(
                angle_diff(p.chart.theta, phi + std::f64::consts::PI).abs() < 1e-7,
                "theta = {}, phi = {phi}",
                p.chart.theta
            );
        }
        // lower circle: theta = phi
        for phi in [0.0, 1.3, 4.0] {
            let p = revolution_torus_point(&ball(), -s, phi, Branch::Minus);
            assert!(angle_diff(p.chart.theta, phi).abs() < 1e-7);
        }
    }

    #[test]
    fn contact_pairings_match_closed_form() {
        // lambda(S_t) = -beta^2 (per unit t), lambda(S_phi) = s r beta
        let prof = Profile::ellipsoid(1.0, 2.0).unwrap();
        let (lo, hi) = prof.latitudes();
        for branch in [Branch::Plus, Branch::Minus] {
            for i in 1..20 {
                let t = lo + (hi - lo) * i as f64 / 20.0;
                let phi = 0.9;
                let (s_t, s_phi) = revolution_tangent_basis(&prof, t, phi, branch);
                let pt = revolution_torus_point(&prof, t, phi, branch);
                let u = unit_dir(pt.chart.theta);
                let lam_t = dot2(u, [s_t[0], s_t[1]]);
                let lam_phi = dot2(u, [s_phi[0], s_phi[1]]);
                let rp = prof.dradius(t);
                let beta2 = 1.0 - rp * rp;
                assert!((lam_t + beta2).abs() < 1e-9, "lam_t = {lam_t}, want {}", -beta2);
                let want = branch.sign() * prof.radius(t) * beta2.sqrt();
                assert!((lam_phi - want).abs() < 1e-9, "lam_phi = {lam_phi}, want {want}");
            }
        }
    }

    #[test]
    fn diamond_directions() {
        let torus = boundary_torus(&Region::Diamond, TorusResolution::default()).unwrap();
        // generic point: direction is the theta line
        let dir = torus.foliation_direction(Branch::Plus, 0.5, 1.0).unwrap();
        match dir {
            FoliationDirection::Regular(v) => {
                assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
                assert!(v[2].abs() > 0.1);
            }
            FoliationDirection::Singular => panic!("generic diamond point is regular"),
        }
        // theta = phi: singular
        let dir = torus.foliation_direction(Branch::Plus, 0.0, 1.0).unwrap();
        assert_eq!(dir, FoliationDirection::Singular);
        let dir = torus.foliation_direction(Branch::Minus, 0.0, 2.0).unwrap();
        assert_eq!(dir, FoliationDirection::Singular);
    }

    #[test]
    fn ball_direction_matches_leaf_tangent() {
        let prof = ball();
        let region = Region::revolution(prof.clone());
        let torus = boundary_torus(&region, TorusResolution::default()).unwrap();
        let (lo, hi) = prof.latitudes();
        for branch in [Branch::Plus, Branch::Minus] {
            for i in 1..32 {
                let m = i as f64 / 32.0;
                let t = lo + m * (hi - lo);
                for phi in [0.0, 0.7, 3.9] {
                    let dir = torus.foliation_direction(branch, m, phi).unwrap();
                    let FoliationDirection::Regular(v) = dir else {
                        panic!("interior band point is regular")
                    };
                    let leaf = revolution_leaf_tangent(&prof, t, phi, branch);
                    let ang = line_angle(v, leaf);
                    assert!(ang < 1e-8, "angle {ang} at t = {t}, branch {branch:?}");
                }
            }
        }
    }

    #[test]
    fn shooting_torus_matches_closed_form_for_ball() {
        // wrap the ball in an identity transform to force the shooting path
        let region = Region::transformed(
            Region::revolution(ball()),
            crate::geometry::ConformalMap::identity(),
        );
        let torus = boundary_torus(
            &region,
            TorusResolution { n_meridian: 8, n_azimuth: 8 },
        )
        .unwrap();
        let prof = ball();
        let (lo, hi) = prof.latitudes();
        for i in 0..8 {
            let m = torus.meridian_fraction(i);
            for j in 0..8 {
                let phi = torus.azimuth(j);
                let got = torus.grid_point(Branch::Plus, i, j);
                let want = revolution_torus_point(&prof, lo + m * (hi - lo), phi, Branch::Plus);
                assert!((got.t - want.t).abs() < 1e-6, "t: {} vs {}", got.t, want.t);
                assert!(
                    (got.chart.q[0] - want.chart.q[0]).abs() < 1e-5
                        && (got.chart.q[1] - want.chart.q[1]).abs() < 1e-5,
                    "q mismatch at ({i}, {j}): {:?} vs {:?}",
                    got.chart.q,
                    want.chart.q
                );
                assert!(angle_diff(got.chart.theta, want.chart.theta).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn branch_plus_is_counterclockwise_of_normal() {
        let p = revolution_torus_point(&ball(), 0.2, 1.1, Branch::Plus);
        let u = unit_dir(1.1);
        assert!(cross2(u, [p.null_dir.x, p.null_dir.y]) > 0.0);
        let m = revolution_torus_point(&ball(), 0.2, 1.1, Branch::Minus);
        assert!(cross2(u, [m.null_dir.x, m.null_dir.y]) < 0.0);
    }
}
