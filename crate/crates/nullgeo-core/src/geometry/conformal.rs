//! Conformal transformations of Minkowski `R^{1,2}` generated by
//! translations, orthochronous Lorentz maps and dilations, together with
//! their action on chart coordinates of null geodesics.
//!
//! Special conformal factors are excluded: they have singular sets, while the
//! subgroup implemented here acts globally.

use super::{chart_of_geodesic, wrap_angle, Event, GeometryError, NullRay, Result, TangentVec};

/// A 3x3 matrix acting on `(t, x, y)` coordinates, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut r = self.0;
        for row in &mut r {
            for cell in row.iter_mut() {
                *cell *= s;
            }
        }
        Mat3(r)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// Inverse of a Lorentz matrix: `eta * transpose * eta`, which only
    /// rearranges and negates entries.
    pub fn lorentz_inverse(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], -m[1][0], -m[2][0]],
            [-m[0][1], m[1][1], m[2][1]],
            [-m[0][2], m[1][2], m[2][2]],
        ])
    }
}

/// One generator of the implemented conformal group.
#[derive(Debug, Clone, PartialEq)]
pub enum ConformalFactor {
    Translation(Event),
    Lorentz(Mat3),
    Dilation(f64),
}

/// A composition of conformal factors, applied in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMap {
    factors: Vec<ConformalFactor>,
    // cached affine forms p -> A p + b of the map and its inverse
    fwd: (Mat3, [f64; 3]),
    inv: (Mat3, [f64; 3]),
}

fn eta_diag(i: usize) -> f64 {
    if i == 0 {
        -1.0
    } else {
        1.0
    }
}

fn validate_lorentz(m: &Mat3) -> Result<()> {
    // Lambda^T eta Lambda = eta, orthochronous
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += m.0[k][i] * eta_diag(k) * m.0[k][j];
            }
            let want = if i == j { eta_diag(i) } else { 0.0 };
            if (acc - want).abs() > 1e-10 {
                return Err(GeometryError::BadLorentz(format!(
                    "Lambda^T eta Lambda deviates at ({i},{j}): {acc:.3e} vs {want}"
                )));
            }
        }
    }
    if m.0[0][0] <= 0.0 {
        return Err(GeometryError::BadLorentz(format!(
            "time orientation reversed (Lambda_00 = {})",
            m.0[0][0]
        )));
    }
    Ok(())
}

impl ConformalMap {
    pub fn identity() -> Self {
        Self::new(Vec::new()).expect("identity is always valid")
    }

    /// Build a map from factors applied in list order. Lorentz factors are
    /// validated to preserve the metric and the time orientation; dilation
    /// scales must be positive.
    pub fn new(factors: Vec<ConformalFactor>) -> Result<Self> {
        for f in &factors {
            match f {
                ConformalFactor::Lorentz(m) => validate_lorentz(m)?,
                ConformalFactor::Dilation(s) => {
                    if !(*s > 0.0) {
                        return Err(GeometryError::BadDilation(*s));
                    }
                }
                ConformalFactor::Translation(_) => {}
            }
        }
        let mut fwd = (Mat3::IDENTITY, [0.0; 3]);
        for f in &factors {
            fwd = compose_affine(f, fwd);
        }
        let mut inv = (Mat3::IDENTITY, [0.0; 3]);
        for f in factors.iter().rev() {
            inv = compose_affine(&invert_factor(f), inv);
        }
        Ok(Self { factors, fwd, inv })
    }

    pub fn translation(dt: f64, dx: f64, dy: f64) -> Self {
        Self::new(vec![ConformalFactor::Translation(Event::new(dt, dx, dy))]).unwrap()
    }

    pub fn dilation(scale: f64) -> Result<Self> {
        Self::new(vec![ConformalFactor::Dilation(scale)])
    }

    /// Boost of the given rapidity along the spatial axis `(ux, uy)`.
    pub fn boost(rapidity: f64, axis: [f64; 2]) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
        if n == 0.0 {
            return Err(GeometryError::BadLorentz("boost axis is zero".to_string()));
        }
        let (ux, uy) = (axis[0] / n, axis[1] / n);
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let m = Mat3([
            [ch, sh * ux, sh * uy],
            [sh * ux, 1.0 + (ch - 1.0) * ux * ux, (ch - 1.0) * ux * uy],
            [sh * uy, (ch - 1.0) * ux * uy, 1.0 + (ch - 1.0) * uy * uy],
        ]);
        Self::new(vec![ConformalFactor::Lorentz(m)])
    }

    /// Spatial rotation about the t-axis.
    pub fn spatial_rotation(angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let m = Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]);
        Self::new(vec![ConformalFactor::Lorentz(m)]).expect("rotation is Lorentz")
    }

    /// `self` followed by `after`.
    pub fn then(&self, after: &ConformalMap) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(after.factors.iter().cloned());
        Self::new(factors).expect("factors were already validated")
    }

    pub fn inverse(&self) -> Self {
        let factors = self.factors.iter().rev().map(invert_factor).collect();
        Self::new(factors).expect("inverse factors are valid")
    }

    pub fn factors(&self) -> &[ConformalFactor] {
        &self.factors
    }

    /// Affine form: `apply(p) = A p + b`.
    pub fn linear_part(&self) -> &Mat3 {
        &self.fwd.0
    }

    pub fn apply(&self, p: Event) -> Event {
        let v = self.fwd.0.mul_vec(p.as_array());
        Event::new(v[0] + self.fwd.1[0], v[1] + self.fwd.1[1], v[2] + self.fwd.1[2])
    }

    pub fn apply_inverse(&self, p: Event) -> Event {
        let v = self.inv.0.mul_vec(p.as_array());
        Event::new(v[0] + self.inv.1[0], v[1] + self.inv.1[1], v[2] + self.inv.1[2])
    }

    /// Push a tangent vector forward (the linear part only).
    pub fn apply_vec(&self, v: TangentVec) -> TangentVec {
        let w = self.fwd.0.mul_vec(v.as_array());
        TangentVec::new(w[0], w[1], w[2])
    }

    pub fn apply_vec_inverse(&self, v: TangentVec) -> TangentVec {
        let w = self.inv.0.mul_vec(v.as_array());
        TangentVec::new(w[0], w[1], w[2])
    }

    /// Inverse-transpose action on gradients (covectors), forward map.
    pub fn apply_covec(&self, g: TangentVec) -> TangentVec {
        let m = self.inv.0.transpose();
        let w = m.mul_vec(g.as_array());
        TangentVec::new(w[0], w[1], w[2])
    }
}

fn invert_factor(f: &ConformalFactor) -> ConformalFactor {
    match f {
        ConformalFactor::Translation(v) => {
            ConformalFactor::Translation(Event::new(-v.t, -v.x, -v.y))
        }
        ConformalFactor::Lorentz(m) => ConformalFactor::Lorentz(m.lorentz_inverse()),
        ConformalFactor::Dilation(s) => ConformalFactor::Dilation(1.0 / s),
    }
}

/// Compose `factor` after the affine map `(A, b)`.
fn compose_affine(f: &ConformalFactor, prev: (Mat3, [f64; 3])) -> (Mat3, [f64; 3]) {
    let (a, b) = prev;
    match f {
        ConformalFactor::Translation(v) => (a, [b[0] + v.t, b[1] + v.x, b[2] + v.y]),
        ConformalFactor::Lorentz(m) => {
            let nb = m.mul_vec(b);
            (m.mul_mat(&a), nb)
        }
        ConformalFactor::Dilation(s) => (a.scale(*s), [s * b[0], s * b[1], s * b[2]]),
    }
}

/// Image of an event under the map.
pub fn apply_conformal(m: &ConformalMap, p: Event) -> Event {
    m.apply(p)
}

/// Chart coordinates of the image geodesic.
///
/// The ray is transported by mapping the event `(0, q)` and the velocity
/// `(1, u(theta))` and re-charting; a pure dilation therefore acts as
/// `(q, theta) -> (s q, theta)`.
pub fn apply_conformal_ray(m: &ConformalMap, r: &NullRay) -> NullRay {
    let p = Event::new(0.0, r.q[0], r.q[1]);
    let v = r.velocity();
    let p2 = m.apply(p);
    let v2 = m.apply_vec(v);
    // the image velocity is future null for the orthochronous conformal group
    let ux = v2.x / v2.t;
    let uy = v2.y / v2.t;
    NullRay {
        q: [p2.x - p2.t * ux, p2.y - p2.t * uy],
        theta: wrap_angle(uy.atan2(ux)),
    }
}

/// Re-chart an explicitly transported geodesic; used by consistency tests.
pub fn chart_of_transported(m: &ConformalMap, p: Event, v: TangentVec) -> Result<NullRay> {
    chart_of_geodesic(m.apply(p), m.apply_vec(v))
}

#[cfg(test)]
mod tests {
    use super::super::{contact_form_eval, eta, ChartVec};
    use super::*;

    #[test]
    fn dilation_scales_intercept() {
        let m = ConformalMap::dilation(2.0).unwrap();
        let r = NullRay::new([1.0, 0.0], 0.0);
        let img = apply_conformal_ray(&m, &r);
        assert!((img.q[0] - 2.0).abs() < 1e-15 && img.q[1].abs() < 1e-15);
        assert_eq!(img.theta, 0.0);
    }

    #[test]
    fn identity_fixes_everything() {
        let m = ConformalMap::identity();
        let p = Event::new(0.3, -1.2, 0.7);
        assert_eq!(m.apply(p), p);
        let r = NullRay::new([0.4, -0.9], 1.234);
        let img = apply_conformal_ray(&m, &r);
        assert!((img.q[0] - r.q[0]).abs() < 1e-15);
        assert!((img.theta - r.theta).abs() < 1e-15);
    }

    #[test]
    fn spatial_translation_shifts_intercept() {
        let m = ConformalMap::translation(0.0, 1.0, 0.0);
        let r = NullRay::new([0.0, 0.0], 0.0);
        let img = apply_conformal_ray(&m, &r);
        assert_eq!(img.q, [1.0, 0.0]);
        assert_eq!(img.theta, 0.0);
    }

    #[test]
    fn boost_preserves_eta() {
        let m = ConformalMap::boost(0.7, [0.6, 0.8]).unwrap();
        let vs = [
            TangentVec::new(1.0, 0.2, -0.3),
            TangentVec::new(0.0, 1.0, 0.0),
            TangentVec::new(1.0, 1.0, 0.0),
        ];
        for v in vs {
            for w in vs {
                let lhs = eta(m.apply_vec(v), m.apply_vec(w));
                assert!((lhs - eta(v, w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = ConformalMap::boost(0.5, [1.0, 0.0])
            .unwrap()
            .then(&ConformalMap::translation(0.2, -0.4, 0.9))
            .then(&ConformalMap::dilation(3.0).unwrap());
        let p = Event::new(0.1, 0.2, 0.3);
        let back = m.apply_inverse(m.apply(p));
        assert!((back.t - p.t).abs() < 1e-13);
        assert!((back.x - p.x).abs() < 1e-13);
        assert!((back.y - p.y).abs() < 1e-13);
    }

    #[test]
    fn bad_lorentz_rejected() {
        let m = Mat3([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(ConformalMap::new(vec![ConformalFactor::Lorentz(m)]).is_err());
        assert!(ConformalMap::dilation(-1.0).is_err());
    }

    #[test]
    fn dilation_preserves_contact_planes() {
        // pushforward of a chart vector under (q, theta) -> (s q, theta)
        // rescales lambda by s > 0, so the kernel is preserved
        let s = 2.5;
        let r = NullRay::new([0.7, -0.2], 1.1);
        let img = NullRay::new([s * r.q[0], s * r.q[1]], r.theta);
        let samples = [
            ChartVec::new([0.3, 0.4], 1.0),
            ChartVec::new([-1.0, 0.0], 0.2),
            ChartVec::new(super::super::rot90(r.dir()), -0.7), // Legendrian
        ];
        for w in samples {
            let before = contact_form_eval(&r, &w);
            let pushed = ChartVec::new([s * w.dq[0], s * w.dq[1]], w.dtheta);
            let after = contact_form_eval(&img, &pushed);
            assert!((after - s * before).abs() < 1e-12);
        }
    }
}
