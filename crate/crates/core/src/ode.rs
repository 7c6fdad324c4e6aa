//! Adaptive Dormand–Prince 5(4) integration for small ODE systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integration state for `y' = f(t, y)`.
pub struct Dopri5<F, const N: usize> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    tol: f64,
    pub steps: usize,
}

impl<F: Fn(f64, &[f64; N]) -> [f64; N], const N: usize> Dopri5<F, N> {
    pub fn new(f: F, t0: f64, y0: [f64; N], h0: f64, tol: f64) -> Self {
        Dopri5 {
            f,
            t: t0,
            y: y0,
            h: h0,
            tol,
            steps: 0,
        }
    }

    /// Advances to exactly `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        const MAX_STEPS: usize = 2_000_000;
        while self.t < t_end {
            if self.steps > MAX_STEPS {
                return Err(Error::Numerical("integrator step budget exhausted".into()));
            }
            let h = self.h.min(t_end - self.t);
            let (y_new, err) = self.trial(h);
            if !err.is_finite() {
                return Err(Error::Numerical(format!("non-finite state at t = {}", self.t)));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.t = if h == t_end - self.t { t_end } else { self.t + h };
                self.y = y_new;
                self.steps += 1;
                self.h = h * factor;
            } else {
                self.h = h * factor;
                if self.h < 1e-300 {
                    return Err(Error::Numerical("step size underflow".into()));
                }
            }
        }
        Ok(())
    }

    fn trial(&self, h: f64) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = self.y;
            for (j, ks) in k.iter().enumerate().take(s) {
                for d in 0..N {
                    ys[d] += h * A[s][j] * ks[d];
                }
            }
            k[s] = (self.f)(self.t + C[s] * h, &ys);
        }
        let mut y_new = self.y;
        let mut err2 = 0.0;
        for d in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][d];
                lo += B_LOW[s] * k[s][d];
            }
            y_new[d] += h * hi;
            let scale = self.tol * (1.0 + self.y[d].abs().max(y_new[d].abs()));
            let e = h * (hi - lo) / scale;
            err2 += e * e;
        }
        (y_new, (err2 / N as f64).sqrt())
    }
}
