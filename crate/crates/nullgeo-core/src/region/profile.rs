//! Radius-squared profiles of surfaces of revolution.
//!
//! A profile is a polynomial `rho` on `[t_min, t_max]` with `rho = r^2` the
//! squared radius of the boundary at time `t`. Smooth caps mean `rho` has
//! simple zeros at the span endpoints; the lightlike latitudes are the two
//! interior roots of `rho'^2 = 4 rho` (equivalently `|r'| = 1`), with the
//! timelike band `rho'^2 < 4 rho` between them.

use crate::numerics::{find_root, Tolerance};

use super::{RegionError, Result};

/// Validation grid used for the sign sweeps.
const SWEEP_POINTS: usize = 4096;

/// A validated radius-squared profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    coeffs: Vec<f64>,
    dcoeffs: Vec<f64>,
    ddcoeffs: Vec<f64>,
    t_min: f64,
    t_max: f64,
    lat_lower: f64,
    lat_upper: f64,
    rho_max: f64,
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

impl Profile {
    /// Profile `rho(t) = b^2 (1 - t^2/a^2)` on `[-a, a]`: the boundary is the
    /// ellipsoid of revolution with time semi-axis `a` and spatial radius `b`.
    pub fn ellipsoid(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(RegionError::BadProfile(format!(
                "ellipsoid semi-axes must be positive, got a = {a}, b = {b}"
            )));
        }
        Self::from_poly(vec![b * b, 0.0, -b * b / (a * a)], -a, a)
    }

    /// Validate and construct a profile from polynomial coefficients
    /// (constant term first).
    pub fn from_poly(coeffs: Vec<f64>, t_min: f64, t_max: f64) -> Result<Self> {
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(RegionError::BadProfile(format!(
                "invalid span [{t_min}, {t_max}]"
            )));
        }
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(RegionError::BadProfile("invalid coefficient list".to_string()));
        }
        let dcoeffs = poly_derivative(&coeffs);
        let ddcoeffs = poly_derivative(&dcoeffs);

        let span = t_max - t_min;
        let mut rho_max = 0.0_f64;
        for k in 0..=SWEEP_POINTS {
            let t = t_min + span * k as f64 / SWEEP_POINTS as f64;
            rho_max = rho_max.max(poly_eval(&coeffs, t).abs());
        }
        if rho_max == 0.0 {
            return Err(RegionError::BadProfile("rho vanishes identically".to_string()));
        }
        let scale = rho_max;

        // smooth caps: simple zeros at the span endpoints
        let rho_lo = poly_eval(&coeffs, t_min);
        let rho_hi = poly_eval(&coeffs, t_max);
        if rho_lo.abs() > 1e-9 * scale || rho_hi.abs() > 1e-9 * scale {
            return Err(RegionError::BadProfile(format!(
                "rho must vanish at the span endpoints (rho({t_min}) = {rho_lo:.3e}, rho({t_max}) = {rho_hi:.3e})"
            )));
        }
        let drho_lo = poly_eval(&dcoeffs, t_min);
        let drho_hi = poly_eval(&dcoeffs, t_max);
        if !(drho_lo > 0.0) || !(drho_hi < 0.0) {
            return Err(RegionError::BadProfile(format!(
                "caps are not smooth: need rho'({t_min}) > 0 and rho'({t_max}) < 0, got {drho_lo:.3e} and {drho_hi:.3e}"
            )));
        }

        // rho > 0 on the open interior
        for k in 1..SWEEP_POINTS {
            let t = t_min + span * k as f64 / SWEEP_POINTS as f64;
            if poly_eval(&coeffs, t) <= 0.0 {
                return Err(RegionError::BadProfile(format!(
                    "rho is not positive on the interior (rho({t}) <= 0)"
                )));
            }
        }

        // rho < 0 on the working window outside the span, so that H < 0
        // wherever the inflated-bounding-box scans evaluate it
        for k in 1..=SWEEP_POINTS / 4 {
            let off = 0.75 * span * k as f64 / (SWEEP_POINTS / 4) as f64;
            for t in [t_min - off, t_max + off] {
                if poly_eval(&coeffs, t) >= 0.0 {
                    return Err(RegionError::BadProfile(format!(
                        "rho must stay negative outside the span, but rho({t}) >= 0"
                    )));
                }
            }
        }

        // exactly two interior roots of rho'^2 - 4 rho, sign pattern +,-,+
        let gap = |t: f64| {
            let d = poly_eval(&dcoeffs, t);
            d * d - 4.0 * poly_eval(&coeffs, t)
        };
        let mut roots = Vec::new();
        let mut prev_t = t_min;
        let mut prev_v = gap(prev_t);
        let tol = Tolerance { abs_tol: 1e-14 * span.max(1.0), rel_tol: 1e-14, max_steps: 200 };
        for k in 1..=SWEEP_POINTS {
            let t = t_min + span * k as f64 / SWEEP_POINTS as f64;
            let v = gap(t);
            if prev_v == 0.0 {
                roots.push(prev_t);
            } else if prev_v * v < 0.0 {
                let r = find_root(gap, prev_t, t, &tol)
                    .map_err(|e| RegionError::BadProfile(format!("latitude root search failed: {e}")))?;
                roots.push(r);
            }
            prev_t = t;
            prev_v = v;
        }
        if roots.len() != 2 {
            return Err(RegionError::BadProfile(format!(
                "rho'^2 - 4 rho must have exactly two interior roots, found {}",
                roots.len()
            )));
        }
        let (lat_lower, lat_upper) = (roots[0], roots[1]);
        // timelike band between the latitudes, spacelike caps outside
        let probes = [
            (0.5 * (t_min + lat_lower), 1.0),
            (0.5 * (lat_lower + lat_upper), -1.0),
            (0.5 * (lat_upper + t_max), 1.0),
        ];
        for (t, want) in probes {
            if gap(t) * want <= 0.0 {
                return Err(RegionError::BadProfile(format!(
                    "rho'^2 - 4 rho has the wrong sign at t = {t} (expected sign {want})"
                )));
            }
        }

        Ok(Self {
            coeffs,
            dcoeffs,
            ddcoeffs,
            t_min,
            t_max,
            lat_lower,
            lat_upper,
            rho_max,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// The two lightlike latitudes `(t_lower, t_upper)`.
    pub fn latitudes(&self) -> (f64, f64) {
        (self.lat_lower, self.lat_upper)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Maximal boundary radius.
    pub fn r_max(&self) -> f64 {
        self.rho_max.sqrt()
    }

    /// `rho(t)` (the raw polynomial; validation guarantees it is negative on
    /// a working window outside the span).
    pub fn rho(&self, t: f64) -> f64 {
        poly_eval(&self.coeffs, t)
    }

    pub fn drho(&self, t: f64) -> f64 {
        poly_eval(&self.dcoeffs, t)
    }

    pub fn ddrho(&self, t: f64) -> f64 {
        poly_eval(&self.ddcoeffs, t)
    }

    /// Boundary radius `r(t) = sqrt(rho)` (zero outside the span).
    pub fn radius(&self, t: f64) -> f64 {
        self.rho(t).max(0.0).sqrt()
    }

    /// `r'(t) = rho' / (2 r)`; only meaningful strictly inside the span.
    pub fn dradius(&self, t: f64) -> f64 {
        self.drho(t) / (2.0 * self.radius(t))
    }

    /// `4 rho - rho'^2`: positive exactly on the timelike band.
    pub fn band(&self, t: f64) -> f64 {
        let d = self.drho(t);
        4.0 * self.rho(t) - d * d
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_latitudes() {
        let p = Profile::ellipsoid(1.0, 1.0).unwrap();
        let (lo, hi) = p.latitudes();
        let want = 1.0 / 2.0_f64.sqrt();
        assert!((lo + want).abs() < 1e-12, "lower latitude {lo}");
        assert!((hi - want).abs() < 1e-12, "upper latitude {hi}");
    }

    #[test]
    fn ellipsoid_latitudes_closed_form() {
        // 4 b^2 (1 - t^2/a^2) = (2 b^2 t / a^2)^2 solves to
        // t = +- a^2 / sqrt(a^2 + b^2)
        for (a, b) in [(1.0, 2.0), (2.0, 2.0), (0.5, 1.5), (3.0, 1.0)] {
            let p = Profile::ellipsoid(a, b).unwrap();
            let want = a * a / (a * a + b * b as f64).sqrt();
            let (lo, hi) = p.latitudes();
            assert!((hi - want).abs() < 1e-11, "a={a}, b={b}: {hi} vs {want}");
            assert!((lo + want).abs() < 1e-11);
        }
    }

    #[test]
    fn ellipsoid_one_two() {
        // 16(1 - t^2) = 64 t^2 gives t = 1/sqrt(5)
        let p = Profile::ellipsoid(1.0, 2.0).unwrap();
        let (lo, hi) = p.latitudes();
        let want = 1.0 / 5.0_f64.sqrt();
        assert!((hi - want).abs() < 1e-12, "{hi}");
        assert!((lo + want).abs() < 1e-12);
    }

    #[test]
    fn quartic_profile_is_valid_but_degenerate_downstream() {
        // rho = 1 + t^2 - t^4 on its positive span; the two latitude roots
        // are at t = +-1, so the profile itself validates. The Hessian
        // degeneracy at t = 0 is caught by the convexity checker.
        let t_end = ((1.0 + 5.0_f64.sqrt()) / 2.0).sqrt();
        let p = Profile::from_poly(vec![1.0, 0.0, 1.0, 0.0, -1.0], -t_end, t_end).unwrap();
        let (lo, hi) = p.latitudes();
        assert!((lo + 1.0).abs() < 1e-9, "{lo}");
        assert!((hi - 1.0).abs() < 1e-9, "{hi}");
        assert!((p.ddrho(0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_profiles_without_smooth_caps() {
        // rho = 1 - t^4 has rho' = -4t^3 with a double-ish cap slope that is
        // fine, but rho = (1 - t^2)^2 has rho'(+-1) = 0
        let r = Profile::from_poly(vec![1.0, 0.0, -2.0, 0.0, 1.0], -1.0, 1.0);
        assert!(matches!(r, Err(RegionError::BadProfile(_))));
    }

    #[test]
    fn rejects_nonvanishing_endpoints() {
        let r = Profile::from_poly(vec![1.0, 0.0, -0.5], -1.0, 1.0);
        assert!(matches!(r, Err(RegionError::BadProfile(_))));
    }

    #[test]
    fn rho_negative_outside_span() {
        let p = Profile::ellipsoid(1.0, 1.0).unwrap();
        assert!(p.rho(1.5) < 0.0);
        assert!(p.rho(-1.7) < 0.0);
        assert_eq!(p.rho(2.0), -3.0);
    }

    #[test]
    fn band_positive_inside_negative_outside() {
        let p = Profile::ellipsoid(1.0, 2.0).unwrap();
        let (lo, hi) = p.latitudes();
        assert!(p.band(0.5 * (lo + hi)) > 0.0);
        assert!(p.band(0.5 * (hi + 1.0)) < 0.0);
    }
}
