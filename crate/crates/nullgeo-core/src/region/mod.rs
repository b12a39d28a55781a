//! Region model: surfaces of revolution from radius-squared profiles,
//! implicit level-set regions, the causal diamond, and conformal images of
//! regions, together with evaluation of the defining function `H` with
//! gradient and Hessian.
//!
//! Sign convention: `H > 0` inside the region, `H = 0` on the boundary,
//! `H < 0` outside.

mod profile;

pub use profile::Profile;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{unit_dir, ConformalMap, Event, NullRay, TangentVec};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RegionError {
    #[error("invalid profile: {0}")]
    BadProfile(String),
    #[error("point ({0:.3e}, {1:.3e}, {2:.3e}) is outside the region's bounding box")]
    OutsideDomain(f64, f64, f64),
    #[error("the {0} region is analytic-only: its boundary-defining function is not smooth")]
    AnalyticOnly(&'static str),
}

pub type Result<T> = std::result::Result<T, RegionError>;

/// Axis-aligned bounding box in `(t, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BBox {
    pub fn contains(&self, p: Event) -> bool {
        let a = p.as_array();
        (0..3).all(|i| a[i] >= self.min[i] && a[i] <= self.max[i])
    }

    pub fn center(&self) -> Event {
        Event::new(
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        )
    }

    pub fn diagonal(&self) -> f64 {
        let d = [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Box inflated about its center by the given factor.
    pub fn inflate(&self, factor: f64) -> BBox {
        let c = self.center().as_array();
        let mut min = [0.0; 3];
        let mut max = [0.0; 3];
        for i in 0..3 {
            let half = 0.5 * (self.max[i] - self.min[i]) * factor;
            min[i] = c[i] - half;
            max[i] = c[i] + half;
        }
        BBox { min, max }
    }

    /// Parameter window of the line `s -> p + s v` inside the box, if any.
    pub fn line_window(&self, p: Event, v: TangentVec) -> Option<(f64, f64)> {
        let p = p.as_array();
        let v = v.as_array();
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..3 {
            if v[i] == 0.0 {
                if p[i] < self.min[i] || p[i] > self.max[i] {
                    return None;
                }
            } else {
                let a = (self.min[i] - p[i]) / v[i];
                let b = (self.max[i] - p[i]) / v[i];
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
        }
        if lo < hi {
            Some((lo, hi))
        } else {
            None
        }
    }
}

type ScalarField = Arc<dyn Fn(Event) -> f64 + Send + Sync>;
type GradField = Arc<dyn Fn(Event) -> TangentVec + Send + Sync>;
type HessField = Arc<dyn Fn(Event) -> [[f64; 3]; 3] + Send + Sync>;

/// An implicit region given by callbacks. The gradient and Hessian callbacks
/// are optional; central finite differences are used when absent.
#[derive(Clone)]
pub struct ImplicitRegion {
    pub h: ScalarField,
    pub grad: Option<GradField>,
    pub hess: Option<HessField>,
    pub bbox: BBox,
}

impl fmt::Debug for ImplicitRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitRegion").field("bbox", &self.bbox).finish()
    }
}

/// Value, gradient and Hessian of the defining function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEval {
    pub h: f64,
    pub grad: TangentVec,
    pub hess: [[f64; 3]; 3],
}

/// A candidate strongly-null-convex region.
#[derive(Debug, Clone)]
pub enum Region {
    Revolution(Profile),
    Implicit(ImplicitRegion),
    /// Domain of dependence of the open unit disc in `{t = 0}`.
    Diamond,
    Transformed { base: Box<Region>, map: ConformalMap },
}

impl Region {
    pub fn revolution(profile: Profile) -> Region {
        Region::Revolution(profile)
    }

    pub fn transformed(base: Region, map: ConformalMap) -> Region {
        Region::Transformed { base: Box::new(base), map }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Region::Revolution(_) => "revolution",
            Region::Implicit(_) => "implicit",
            Region::Diamond => "diamond",
            Region::Transformed { .. } => "transformed",
        }
    }

    /// The revolution profile, if this region is (a chain of maps over) one.
    pub fn profile(&self) -> Option<&Profile> {
        match self {
            Region::Revolution(p) => Some(p),
            _ => None,
        }
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Region::Revolution(p) => {
                let r = p.r_max();
                BBox { min: [p.t_min(), -r, -r], max: [p.t_max(), r, r] }
            }
            Region::Implicit(im) => im.bbox,
            Region::Diamond => BBox { min: [-1.0, -1.0, -1.0], max: [1.0, 1.0, 1.0] },
            Region::Transformed { base, map } => {
                let b = base.bbox();
                let mut min = [f64::INFINITY; 3];
                let mut max = [f64::NEG_INFINITY; 3];
                for i in 0..8 {
                    let corner = Event::new(
                        if i & 1 == 0 { b.min[0] } else { b.max[0] },
                        if i & 2 == 0 { b.min[1] } else { b.max[1] },
                        if i & 4 == 0 { b.min[2] } else { b.max[2] },
                    );
                    let c = map.apply(corner).as_array();
                    for k in 0..3 {
                        min[k] = min[k].min(c[k]);
                        max[k] = max[k].max(c[k]);
                    }
                }
                BBox { min, max }
            }
        }
    }

    /// A point in the interior, used as the center for shooting scans.
    pub fn interior_point(&self) -> Event {
        match self {
            Region::Revolution(p) => {
                // time of maximal radius on a coarse grid
                let mut best = (p.t_min(), f64::NEG_INFINITY);
                for k in 1..256 {
                    let t = p.t_min() + (p.t_max() - p.t_min()) * k as f64 / 256.0;
                    let v = p.rho(t);
                    if v > best.1 {
                        best = (t, v);
                    }
                }
                Event::new(best.0, 0.0, 0.0)
            }
            Region::Implicit(im) => {
                // coarse grid search for a deep interior point
                let mut best = (im.bbox.center(), f64::NEG_INFINITY);
                let n = 9;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let p = Event::new(
                                im.bbox.min[0]
                                    + (im.bbox.max[0] - im.bbox.min[0]) * (i as f64 + 0.5)
                                        / n as f64,
                                im.bbox.min[1]
                                    + (im.bbox.max[1] - im.bbox.min[1]) * (j as f64 + 0.5)
                                        / n as f64,
                                im.bbox.min[2]
                                    + (im.bbox.max[2] - im.bbox.min[2]) * (k as f64 + 0.5)
                                        / n as f64,
                            );
                            let v = (im.h)(p);
                            if v > best.1 {
                                best = (p, v);
                            }
                        }
                    }
                }
                best.0
            }
            Region::Diamond => Event::ORIGIN,
            Region::Transformed { base, map } => map.apply(base.interior_point()),
        }
    }

    /// Scale of `H` over the bounding box, used for boundary tolerances.
    pub fn h_scale(&self) -> f64 {
        match self {
            Region::Revolution(p) => p.rho_max().max(p.r_max() * p.r_max()).max(1e-12),
            Region::Diamond => 1.0,
            Region::Transformed { base, .. } => base.h_scale(),
            Region::Implicit(im) => {
                let mut scale = 0.0_f64;
                for i in 0..5 {
                    for j in 0..5 {
                        for k in 0..5 {
                            let p = Event::new(
                                im.bbox.min[0]
                                    + (im.bbox.max[0] - im.bbox.min[0]) * i as f64 / 4.0,
                                im.bbox.min[1]
                                    + (im.bbox.max[1] - im.bbox.min[1]) * j as f64 / 4.0,
                                im.bbox.min[2]
                                    + (im.bbox.max[2] - im.bbox.min[2]) * k as f64 / 4.0,
                            );
                            scale = scale.max((im.h)(p).abs());
                        }
                    }
                }
                scale.max(1e-12)
            }
        }
    }

    /// `H(p)`. Defined everywhere for revolution and diamond regions; errors
    /// outside the bounding box for implicit regions.
    pub fn value(&self, p: Event) -> Result<f64> {
        match self {
            Region::Revolution(prof) => Ok(prof.rho(p.t) - p.x * p.x - p.y * p.y),
            Region::Diamond => Ok(1.0 - (p.t.abs() + (p.x * p.x + p.y * p.y).sqrt())),
            Region::Implicit(im) => {
                if !im.bbox.contains(p) {
                    return Err(RegionError::OutsideDomain(p.t, p.x, p.y));
                }
                Ok((im.h)(p))
            }
            Region::Transformed { base, map } => base.value(map.apply_inverse(p)),
        }
    }

    /// `H`, gradient and Hessian. Exact for revolution regions, callbacks or
    /// central finite differences for implicit ones, chain rule through the
    /// affine map for transformed ones. The diamond is analytic-only.
    pub fn eval(&self, p: Event) -> Result<HEval> {
        match self {
            Region::Revolution(prof) => Ok(HEval {
                h: prof.rho(p.t) - p.x * p.x - p.y * p.y,
                grad: TangentVec::new(prof.drho(p.t), -2.0 * p.x, -2.0 * p.y),
                hess: [
                    [prof.ddrho(p.t), 0.0, 0.0],
                    [0.0, -2.0, 0.0],
                    [0.0, 0.0, -2.0],
                ],
            }),
            Region::Diamond => Err(RegionError::AnalyticOnly("diamond")),
            Region::Implicit(im) => {
                if !im.bbox.contains(p) {
                    return Err(RegionError::OutsideDomain(p.t, p.x, p.y));
                }
                let h = (im.h)(p);
                let step = 1e-5
                    * (im.bbox.diagonal() / 3.0_f64.sqrt()).max(1.0);
                let grad = match &im.grad {
                    Some(g) => g(p),
                    None => fd_gradient(&im.h, p, step),
                };
                let hess = match &im.hess {
                    Some(hs) => hs(p),
                    None => fd_hessian(&im.h, p, step.sqrt() * 1e-2),
                };
                Ok(HEval { h, grad, hess })
            }
            Region::Transformed { base, map } => {
                let q = map.apply_inverse(p);
                let b = base.eval(q)?;
                let grad = map.apply_covec(b.grad);
                // Hess_T = A_inv^T Hess_base A_inv
                let a_inv = map.inverse();
                let cols: Vec<TangentVec> = (0..3)
                    .map(|j| {
                        let e = [
                            (j == 0) as u8 as f64,
                            (j == 1) as u8 as f64,
                            (j == 2) as u8 as f64,
                        ];
                        a_inv.apply_vec(TangentVec::new(e[0], e[1], e[2]))
                    })
                    .collect();
                let mut hess = [[0.0; 3]; 3];
                for (i, hrow) in hess.iter_mut().enumerate() {
                    for (j, cell) in hrow.iter_mut().enumerate() {
                        *cell = quadratic_form_pair(&b.hess, cols[i], cols[j]);
                    }
                }
                Ok(HEval { h: b.h, grad, hess })
            }
        }
    }

    /// Quadratic form `Hess H (v, v)` at `p`.
    pub fn hessian_form(&self, p: Event, v: TangentVec) -> Result<f64> {
        let e = self.eval(p)?;
        Ok(quadratic_form_pair(&e.hess, v, v))
    }
}

/// `w^T M v` for a symmetric 3x3 matrix.
pub fn quadratic_form_pair(m: &[[f64; 3]; 3], w: TangentVec, v: TangentVec) -> f64 {
    let wv = w.as_array();
    let vv = v.as_array();
    let mut acc = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            acc += wv[i] * cell * vv[j];
        }
    }
    acc
}

fn fd_gradient(h: &ScalarField, p: Event, step: f64) -> TangentVec {
    let mut g = [0.0; 3];
    let base = p.as_array();
    for (i, gi) in g.iter_mut().enumerate() {
        let mut hi = base;
        let mut lo = base;
        hi[i] += step;
        lo[i] -= step;
        *gi = (h(Event::new(hi[0], hi[1], hi[2])) - h(Event::new(lo[0], lo[1], lo[2])))
            / (2.0 * step);
    }
    TangentVec::new(g[0], g[1], g[2])
}

fn fd_hessian(h: &ScalarField, p: Event, step: f64) -> [[f64; 3]; 3] {
    let base = p.as_array();
    let at = |d: [f64; 3]| {
        h(Event::new(base[0] + d[0], base[1] + d[1], base[2] + d[2]))
    };
    let h0 = at([0.0; 3]);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = if i == j {
                let mut dp = [0.0; 3];
                let mut dm = [0.0; 3];
                dp[i] = step;
                dm[i] = -step;
                (at(dp) - 2.0 * h0 + at(dm)) / (step * step)
            } else {
                let mut pp = [0.0; 3];
                let mut pm = [0.0; 3];
                let mut mp = [0.0; 3];
                let mut mm = [0.0; 3];
                pp[i] = step;
                pp[j] += step;
                pm[i] = step;
                pm[j] -= step;
                mp[i] = -step;
                mp[j] += step;
                mm[i] = -step;
                mm[j] -= step;
                (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * step * step)
            };
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Report of the conformal star-shapedness sampling check.
#[derive(Debug, Clone, Serialize)]
pub struct StarShapedReport {
    pub passed: bool,
    pub n_dirs: usize,
    pub failures: Vec<StarFailure>,
}

/// A sampled ray with an unexpected number of boundary crossings.
#[derive(Debug, Clone, Serialize)]
pub struct StarFailure {
    pub dir: [f64; 3],
    pub crossings: usize,
}

/// Check that every ray from `center` crosses the boundary exactly once.
///
/// `n_dirs` directions are sampled on a deterministic Fibonacci sphere; each
/// ray is marched to the inflated bounding box and the sign changes of `H`
/// are counted.
pub fn star_shaped_check(region: &Region, center: Event, n_dirs: usize) -> Result<StarShapedReport> {
    let h0 = region.value(center)?;
    if h0 <= 0.0 {
        return Err(RegionError::BadProfile(format!(
            "star-shapedness center must be interior (H = {h0:.3e})"
        )));
    }
    let bbox = region.bbox().inflate(1.5);
    let samples = 512;
    let mut failures = Vec::new();
    for k in 0..n_dirs {
        // Fibonacci sphere
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n_dirs as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = k as f64 * std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        let dir = TangentVec::new(z, r * phi.cos(), r * phi.sin());
        let Some((_, hi)) = bbox.line_window(center, dir) else {
            continue;
        };
        let reach = hi.max(0.0);
        let mut crossings = 0usize;
        let mut prev = h0;
        let mut last = h0;
        for m in 1..=samples {
            let s = reach * m as f64 / samples as f64;
            let p = center + dir.scale(s);
            let v = region.value(p).unwrap_or(-1.0);
            if prev * v < 0.0 {
                crossings += 1;
            }
            if v != 0.0 {
                prev = v;
            }
            last = v;
        }
        if crossings != 1 || last > 0.0 {
            failures.push(StarFailure { dir: dir.as_array(), crossings });
        }
    }
    Ok(StarShapedReport { passed: failures.is_empty(), n_dirs, failures })
}

/// The boundary torus of the causal diamond in closed form:
/// `(phi, theta) -> (q = u(phi), theta)`.
pub fn diamond_boundary_torus() -> impl Fn(f64, f64) -> NullRay {
    |phi: f64, theta: f64| NullRay::new(unit_dir(phi), theta)
}

/// Smoothed union of two Euclidean balls; fails star-shapedness and chord
/// connectivity, used as a negative control in tests and the selftest.
pub fn two_ball_union_region() -> Region {
    let centers = [Event::new(0.0, 0.0, 0.0), Event::new(5.0, 5.0, 0.0)];
    let k = 6.0;
    let h = move |p: Event| {
        let h1 = 1.0 - (p - centers[0]).norm().powi(2);
        let h2 = 1.0 - (p - centers[1]).norm().powi(2);
        let m = h1.max(h2);
        // log-sum-exp smoothing of max(h1, h2)
        m + ((k * (h1 - m)).exp() + (k * (h2 - m)).exp()).ln() / k
    };
    Region::Implicit(ImplicitRegion {
        h: Arc::new(h),
        grad: None,
        hess: None,
        bbox: BBox { min: [-1.5, -1.5, -1.5], max: [6.5, 6.5, 1.5] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConformalMap;

    fn unit_ball() -> Region {
        Region::revolution(Profile::ellipsoid(1.0, 1.0).unwrap())
    }

    #[test]
    fn unit_ball_h_values() {
        let b = unit_ball();
        let e = b.eval(Event::new(0.0, 1.0, 0.0)).unwrap();
        assert!(e.h.abs() < 1e-15);
        assert_eq!(e.grad, TangentVec::new(0.0, -2.0, 0.0));
        assert_eq!(e.hess[0][0], -2.0);
        assert_eq!(e.hess[1][1], -2.0);
        assert_eq!(e.hess[2][2], -2.0);
        assert_eq!(b.value(Event::ORIGIN).unwrap(), 1.0);
        assert_eq!(b.value(Event::new(2.0, 0.0, 0.0)).unwrap(), -3.0);
    }

    #[test]
    fn revolution_sign_matches_radius() {
        let b = Region::revolution(Profile::ellipsoid(1.0, 2.0).unwrap());
        let prof = b.profile().unwrap();
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let t = -1.2 + 2.4 * next();
            let x = -2.2 + 4.4 * next();
            let y = -2.2 + 4.4 * next();
            let h = b.value(Event::new(t, x, y)).unwrap();
            let inside = x * x + y * y < prof.rho(t);
            assert_eq!(h > 0.0, inside, "at ({t}, {x}, {y})");
        }
    }

    #[test]
    fn implicit_fd_matches_analytic_revolution() {
        let prof = Profile::ellipsoid(1.0, 1.0).unwrap();
        let analytic = Region::revolution(prof.clone());
        let wrapped = Region::Implicit(ImplicitRegion {
            h: Arc::new(move |p: Event| prof.rho(p.t) - p.x * p.x - p.y * p.y),
            grad: None,
            hess: None,
            bbox: BBox { min: [-1.0, -1.0, -1.0], max: [1.0, 1.0, 1.0] },
        });
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let p = Event::new(
                -0.6 + 1.2 * next(),
                -0.6 + 1.2 * next(),
                -0.6 + 1.2 * next(),
            );
            let ea = analytic.eval(p).unwrap();
            let ei = wrapped.eval(p).unwrap();
            let gn = ea.grad.norm().max(1.0);
            assert!((ea.grad - ei.grad).norm() / gn < 1e-6, "gradient mismatch at {p:?}");
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (ea.hess[i][j] - ei.hess[i][j]).abs() < 1e-4 * 2.0,
                        "hessian mismatch at {p:?}: {:?} vs {:?}",
                        ea.hess,
                        ei.hess
                    );
                }
            }
        }
    }

    #[test]
    fn transformed_boundary_is_mapped_boundary() {
        let map = ConformalMap::boost(0.6, [1.0, 0.0]).unwrap();
        let ball = unit_ball();
        let boosted = Region::transformed(unit_ball(), map.clone());
        for k in 0..100 {
            let theta = k as f64 * 0.8;
            let p = Event::new(
                0.9 * (0.1 * k as f64).sin(),
                theta.cos() * 0.7,
                theta.sin() * 0.7,
            );
            let hb = ball.value(p).unwrap();
            let ht = boosted.value(map.apply(p)).unwrap();
            assert!((hb - ht).abs() < 1e-12, "H mismatch: {hb} vs {ht}");
        }
    }

    #[test]
    fn transformed_eval_chain_rule() {
        // compare analytic chain rule against finite differences of value()
        let map = ConformalMap::boost(0.5, [0.6, 0.8])
            .unwrap()
            .then(&ConformalMap::translation(0.1, -0.2, 0.3))
            .then(&ConformalMap::dilation(1.7).unwrap());
        let region = Region::transformed(unit_ball(), map);
        let p = Event::new(0.3, 0.2, -0.4);
        let e = region.eval(p).unwrap();
        let step = 1e-5;
        let g_fd = fd_gradient(
            &(Arc::new({
                let r = region.clone();
                move |q: Event| r.value(q).unwrap()
            }) as ScalarField),
            p,
            step,
        );
        assert!((e.grad - g_fd).norm() < 1e-7 * e.grad.norm().max(1.0));
    }

    #[test]
    fn star_shaped_examples() {
        let b = unit_ball();
        assert!(star_shaped_check(&b, Event::ORIGIN, 64).unwrap().passed);
        assert!(star_shaped_check(&b, Event::new(0.0, 0.5, 0.0), 64).unwrap().passed);
        let union = two_ball_union_region();
        let rep = star_shaped_check(&union, Event::new(0.0, 0.0, 0.0), 128).unwrap();
        assert!(!rep.passed, "two-ball union must fail the star check");
    }

    #[test]
    fn diamond_torus_examples() {
        let torus = diamond_boundary_torus();
        let r = torus(0.0, 0.0);
        assert_eq!(r.q, [1.0, 0.0]);
        assert_eq!(r.theta, 0.0);
        let r = torus(std::f64::consts::FRAC_PI_2, 0.0);
        assert!((r.q[0]).abs() < 1e-15 && (r.q[1] - 1.0).abs() < 1e-15);
        for k in 0..32 {
            let r = torus(0.37 * k as f64, 0.11 * k as f64);
            let norm = (r.q[0] * r.q[0] + r.q[1] * r.q[1]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diamond_value_but_no_eval() {
        let d = Region::Diamond;
        assert!(d.value(Event::ORIGIN).unwrap() > 0.0);
        assert!(d.value(Event::new(0.9, 0.5, 0.0)).unwrap() < 0.0);
        assert!(matches!(d.eval(Event::ORIGIN), Err(RegionError::AnalyticOnly(_))));
    }

    #[test]
    fn implicit_outside_bbox_errors() {
        let union = two_ball_union_region();
        assert!(matches!(
            union.value(Event::new(100.0, 0.0, 0.0)),
            Err(RegionError::OutsideDomain(..))
        ));
    }
}
