//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-or-not systems.
//!
//! Integration may run in either direction; the observer is called after
//! every accepted step and may stop the integration early.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    /// True when the observer asked to stop before reaching the end point.
    pub stopped: bool,
    pub steps: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// difference between the 5th and embedded 4th order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 5_000_000;

/// Integrate `y' = f(t, y)` from `t0` to `t1`.
///
/// `h` carries the step-size suggestion in and out so consecutive calls over
/// adjacent intervals do not restart the controller.
pub fn integrate<const D: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t1: f64,
    h: &mut f64,
    tol: Tolerance,
    mut observe: O,
) -> Result<Outcome<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    O: FnMut(f64, &[f64; D]) -> bool,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut steps = 0;
    if span == 0.0 {
        return Ok(Outcome { t, y, stopped: false, steps });
    }
    let mut hh = if h.is_finite() && *h > 0.0 { h.min(span) } else { 1e-3 * span };
    let mut k = [[0.0; D]; 7];
    k[0] = f(t, &y);

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-15 * span.max(t1.abs()) {
            break;
        }
        let last = hh >= remaining;
        let step = if last { remaining } else { hh };
        let hs = step * dir;

        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += hs * acc;
            }
            k[s] = f(t + C[s] * hs, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..D {
            let mut acc = 0.0;
            let mut e = 0.0;
            for s in 0..6 {
                acc += A[6][s] * k[s][i];
            }
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            y_new[i] = y[i] + hs * acc;
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((hs * e).abs() / scale);
        }
        if y_new.iter().any(|v| !v.is_finite()) {
            err = f64::INFINITY;
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StiffnessFailure { r: t, step });
        }
        if err.is_finite() && err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k[0] = k[6]; // first-same-as-last
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                hh = step * fac;
            }
            if !observe(t, &y) {
                *h = hh;
                return Ok(Outcome { t, y, stopped: true, steps });
            }
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            hh = step * fac;
            if hh < 1e-14 * t.abs().max(span) {
                return Err(Error::StiffnessFailure { r: t, step: hh });
            }
        }
    }
    *h = hh;
    Ok(Outcome { t, y, stopped: false, steps })
}
