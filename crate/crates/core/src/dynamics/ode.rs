//! Dormand–Prince 5(4) with embedded error control, for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-12, max_steps: 10_000_000 }
    }
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (a, k) in terms {
        for i in 0..N {
            out[i] += h * a * k[i];
        }
    }
    out
}

impl Dopri5 {
    /// Integrate `y' = f(t, y)` from `t0` to `t1 ≥ t0`.
    ///
    /// `h_hint` is the initial step; it is returned updated so successive
    /// calls over a grid keep the learned step size.
    pub fn integrate<const N: usize, F>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        h_hint: &mut f64,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
            return Err(Error::invalid("integration interval must be finite and forward"));
        }
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepSize { t: t0 });
        }
        let mut t = t0;
        let mut y = y0;
        if t1 == t0 {
            return Ok(y);
        }
        let span = t1 - t0;
        let mut h = if *h_hint > 0.0 { h_hint.min(span) } else { span * 1e-3 };
        let mut k1 = f(t, &y);
        let mut steps = 0usize;
        while t < t1 {
            if steps >= self.max_steps {
                return Err(Error::StepSize { t });
            }
            steps += 1;
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(
                t + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = f(
                t + h,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(t + h, &y_new);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::StepSize { t });
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h <= f64::EPSILON * t.abs().max(span) {
                return Err(Error::StepSize { t });
            }
            if err <= 1.0 && !last {
                *h_hint = h;
            }
        }
        Ok(y)
    }
}
