//! Bracketed scalar root finding (Brent's method).

use super::{NumericsError, Result, Tolerance};

/// Find a root of `f` in `[lo, hi]`.
///
/// Requires a sign change (or an exact zero at an endpoint). Convergence is
/// guaranteed; the returned point has bracket width at most
/// `tol.abs_tol + tol.rel_tol * |x|`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(NumericsError::NonFinite { at: a });
    }
    if !fb.is_finite() {
        return Err(NumericsError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(NumericsError::NoBracket { lo, hi, flo: fa, fhi: fb });
    }

    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;

    for _ in 0..tol.max_steps.max(64) {
        let eps = tol.abs_tol + tol.rel_tol * b.abs();
        if fb == 0.0 || (b - a).abs() <= eps {
            return Ok(b);
        }

        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            // secant
            b - fb * (b - a) / (fb - fa)
        };

        let lo_guard = (3.0 * a + b) / 4.0;
        let out_of_range = (s - lo_guard) * (s - b) >= 0.0;
        let step_too_big = if mflag {
            (s - b).abs() >= 0.5 * (b - c).abs()
        } else {
            (s - b).abs() >= 0.5 * d.abs()
        };
        let interval_too_small = if mflag {
            (b - c).abs() < eps
        } else {
            d.abs() < eps
        };
        if out_of_range || step_too_big || interval_too_small {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }

        let fs = f(s);
        if !fs.is_finite() {
            return Err(NumericsError::NonFinite { at: s });
        }
        d = c - b;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::root()
    }

    #[test]
    fn identity_root() {
        let x = find_root(|x| x, -1.0, 1.0, &tol()).unwrap();
        assert!(x.abs() < 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let x = find_root(|x| x * x - 2.0, 0.0, 2.0, &tol()).unwrap();
        assert!((x - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unit_ball_lightlike_latitude() {
        // 4*rho(t) = rho'(t)^2 for rho = 1 - t^2 means 4(1 - t^2) = 4t^2,
        // i.e. t = 1/sqrt(2)
        let f = |t: f64| 4.0 * (1.0 - t * t) - (-2.0 * t) * (-2.0 * t);
        let x = find_root(f, 0.0, 1.0, &tol()).unwrap();
        assert!((x - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12, "got {x}");
    }

    #[test]
    fn no_bracket_is_reported() {
        let r = find_root(|x| x * x + 1.0, -1.0, 1.0, &tol());
        assert!(matches!(r, Err(NumericsError::NoBracket { .. })));
    }

    #[test]
    fn endpoint_roots_returned_exactly() {
        assert_eq!(find_root(|x| x, 0.0, 1.0, &tol()).unwrap(), 0.0);
        assert_eq!(find_root(|x| x - 1.0, 0.0, 1.0, &tol()).unwrap(), 1.0);
    }

    #[test]
    fn steep_function() {
        let x = find_root(|x| (x - 0.123456789).powi(3), -10.0, 10.0, &tol()).unwrap();
        assert!((x - 0.123456789).abs() < 1e-4); // cubic flatness limits attainable accuracy
    }
}
