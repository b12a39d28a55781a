//! Explicit embedded Runge–Kutta 4(5) integration (Dormand–Prince pair) with
//! PI step-size control and event location.
//!
//! Integration may run forward or backward in time (`t1 < t0`). Events are
//! located by bisection with fresh embedded steps from the last accepted
//! point, to the absolute tolerance of the supplied [`Tolerance`].

use super::{NumericsError, Result, Tolerance};

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// b5 - b4, used for the embedded error estimate
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Which zero crossings of an event guard should fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    Rising,
    Falling,
    Any,
}

/// A scalar guard function watched during integration.
///
/// The guard must be continuous along trajectories; the crossing time is
/// located to the integration `abs_tol`. A terminal event truncates the
/// trajectory at the crossing.
pub struct OdeEvent<'a> {
    pub guard: &'a dyn Fn(f64, &[f64]) -> f64,
    pub direction: EventDirection,
    pub terminal: bool,
}

/// A located guard crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub event_index: usize,
    pub time: f64,
    pub state: Vec<f64>,
}

/// Accepted integration steps plus located events.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
    pub events: Vec<EventRecord>,
    /// Index of the terminal event that stopped integration, if any.
    pub terminated_by: Option<usize>,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    /// Dense output by cubic Hermite interpolation between accepted steps.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if n == 1 {
            return self.states[0].clone();
        }
        let forward = self.times[n - 1] >= self.times[0];
        let mut i = 0;
        while i + 2 < n {
            let next = self.times[i + 1];
            if (forward && t <= next) || (!forward && t >= next) {
                break;
            }
            i += 1;
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        if h == 0.0 {
            return self.states[i].clone();
        }
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..self.states[i].len())
            .map(|k| {
                h00 * self.states[i][k]
                    + h10 * h * self.derivs[i][k]
                    + h01 * self.states[i + 1][k]
                    + h11 * h * self.derivs[i + 1][k]
            })
            .collect()
    }
}

/// One embedded Dormand–Prince step of size `h` from `(t, y)`.
///
/// Returns the 5th-order solution and the embedded error estimate per
/// component. Errors if the right-hand side returns non-finite values.
pub fn rk45_step<F>(rhs: &F, t: f64, y: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y.len();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];

    rhs(t, y, &mut k[0]);
    for s in 1..7 {
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            ytmp[i] = y[i] + h * acc;
        }
        let ts = t + C[s] * h;
        let (head, tail) = k.split_at_mut(s);
        let _ = head;
        rhs(ts, &ytmp, &mut tail[0]);
    }

    let mut y5 = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for i in 0..dim {
        let mut acc5 = 0.0;
        let mut acce = 0.0;
        for s in 0..7 {
            acc5 += B5[s] * k[s][i];
            acce += E[s] * k[s][i];
        }
        y5[i] = y[i] + h * acc5;
        err[i] = h * acce;
        if !y5[i].is_finite() {
            return Err(NumericsError::NonFinite { at: t });
        }
    }
    Ok((y5, err))
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], tol: &Tolerance) -> f64 {
    let mut acc = 0.0;
    for i in 0..err.len() {
        let scale = tol.abs_tol + tol.rel_tol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / scale;
        acc += e * e;
    }
    (acc / err.len() as f64).sqrt()
}

struct Crossing {
    event_index: usize,
    terminal: bool,
}

fn detect_crossing(g0: f64, g1: f64, direction: EventDirection) -> bool {
    let crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
    if !crossed {
        return false;
    }
    match direction {
        EventDirection::Rising => g0 < 0.0,
        EventDirection::Falling => g0 > 0.0,
        EventDirection::Any => true,
    }
}

/// Integrate `rhs` from `(t0, y0)` to `t1` with adaptive steps.
///
/// `t1 < t0` integrates backward. Every guard in `events` is watched on each
/// accepted step; crossings are located to `tol.abs_tol` in time and recorded
/// in order. A terminal event truncates the trajectory at the crossing.
pub fn ode_integrate<F>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    events: &[OdeEvent<'_>],
    tol: &Tolerance,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();

    let mut deriv0 = vec![0.0; dim];
    rhs(t0, y0, &mut deriv0);
    if deriv0.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite { at: t0 });
    }

    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![y0.to_vec()],
        derivs: vec![deriv0],
        events: Vec::new(),
        terminated_by: None,
    };
    if span == 0.0 {
        return Ok(traj);
    }

    let mut guards: Vec<f64> = events.iter().map(|e| (e.guard)(t0, y0)).collect();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = dir * (span / 100.0).min(1e-2 * span.max(1.0));
    // guards are sampled once per accepted step, so cap the step size when
    // events are watched: a step spanning two crossings would miss both
    let h_cap = if events.is_empty() { f64::INFINITY } else { span / 64.0 };
    let h_min = span * 1e-15;
    let mut prev_err_norm = 1.0_f64;
    let mut steps = 0_usize;

    while (t1 - t) * dir > 0.0 {
        if steps >= tol.max_steps {
            return Err(NumericsError::Budget {
                limit: tol.max_steps,
                context: format!("ode integration stalled at t = {t:.6e}"),
            });
        }
        steps += 1;

        if h.abs() > h_cap {
            h = dir * h_cap;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < h_min {
            return Err(NumericsError::Stiff { at: t, step: h.abs() });
        }

        let (y_new, err) = rk45_step(&rhs, t, &y, h)?;
        let en = error_norm(&err, &y, &y_new, tol);
        if !en.is_finite() {
            return Err(NumericsError::NonFinite { at: t });
        }

        if en <= 1.0 {
            let t_new = t + h;
            // PI controller (accepted step)
            let fac = 0.9 * en.max(1e-10).powf(-0.7 / 5.0) * prev_err_norm.max(1e-10).powf(0.4 / 5.0);
            prev_err_norm = en.max(1e-10);
            let h_next = h * fac.clamp(0.2, 5.0);

            // event detection on the accepted interval
            let mut fired: Option<Crossing> = None;
            let mut fired_time = t_new;
            let mut fired_state = y_new.clone();
            for (idx, ev) in events.iter().enumerate() {
                let g1 = (ev.guard)(t_new, &y_new);
                if detect_crossing(guards[idx], g1, ev.direction) {
                    // bisect on step size from the last accepted point
                    let (te, ye) = locate_event(&rhs, t, &y, h, ev, guards[idx], tol)?;
                    let earlier = match fired {
                        None => true,
                        Some(_) => (te - fired_time) * dir < 0.0,
                    };
                    if earlier {
                        fired = Some(Crossing { event_index: idx, terminal: ev.terminal });
                        fired_time = te;
                        fired_state = ye;
                    }
                }
                guards[idx] = g1;
            }

            if let Some(cross) = fired {
                traj.events.push(EventRecord {
                    event_index: cross.event_index,
                    time: fired_time,
                    state: fired_state.clone(),
                });
                if cross.terminal {
                    let mut d = vec![0.0; dim];
                    rhs(fired_time, &fired_state, &mut d);
                    traj.times.push(fired_time);
                    traj.states.push(fired_state);
                    traj.derivs.push(d);
                    traj.terminated_by = Some(cross.event_index);
                    return Ok(traj);
                }
                // non-terminal: refresh guards at the step end
                for (idx, ev) in events.iter().enumerate() {
                    guards[idx] = (ev.guard)(t_new, &y_new);
                }
            }

            let mut d = vec![0.0; dim];
            rhs(t_new, &y_new, &mut d);
            traj.times.push(t_new);
            traj.states.push(y_new.clone());
            traj.derivs.push(d);
            t = t_new;
            y = y_new;
            h = h_next;
        } else {
            let fac = 0.9 * en.powf(-0.2);
            h *= fac.clamp(0.1, 0.7);
        }
    }

    Ok(traj)
}

/// Locate a guard crossing inside an accepted step by bisection on the step
/// size, taking fresh embedded steps from `(t, y)`.
fn locate_event<F>(
    rhs: &F,
    t: f64,
    y: &[f64],
    h: f64,
    ev: &OdeEvent<'_>,
    g_left: f64,
    tol: &Tolerance,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let mut lo = 0.0_f64; // fraction of h with guard sign = sign(g_left)
    let mut hi = 1.0_f64;
    let mut y_hi = {
        let (ynew, _) = rk45_step(rhs, t, y, h)?;
        ynew
    };
    for _ in 0..128 {
        if (hi - lo).abs() * h.abs() <= tol.abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (ym, _) = rk45_step(rhs, t, y, mid * h)?;
        let gm = (ev.guard)(t + mid * h, &ym);
        let same_side = (g_left > 0.0 && gm > 0.0) || (g_left < 0.0 && gm < 0.0);
        if same_side {
            lo = mid;
        } else {
            hi = mid;
            y_hi = ym;
        }
    }
    Ok((t + hi * h, y_hi))
}
