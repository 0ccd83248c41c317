//! Dormand–Prince 5(4) with step control and quartic dense output.
//!
//! The shooting integration needs three things beyond a plain RK step:
//! dense output inside accepted steps (for event location), an absolute +
//! relative error control at tolerances down to 1e-12, and a clean failure
//! mode on step-size underflow.

use crate::{Error, Result};

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
// b - b̂ (5th minus embedded 4th order)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output constants (Hairer–Nørsett–Wanner continuous extension).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    r1: [f64; N],
    r2: [f64; N],
    r3: [f64; N],
    r4: [f64; N],
    r5: [f64; N],
}

impl<const N: usize> DenseStep<N> {
    /// State at t0 + θ·h, θ ∈ [0, 1].
    pub fn eval(&self, theta: f64) -> [f64; N] {
        let om = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.r1[i]
                + theta
                    * (self.r2[i] + om * (self.r3[i] + theta * (self.r4[i] + om * self.r5[i])));
        }
        y
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Adaptive integrator for y' = f(t, y).
pub struct Dopri5<const N: usize> {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
}

impl<const N: usize> Dopri5<N> {
    pub fn new(tol: f64) -> Self {
        Dopri5 {
            abs_tol: tol,
            rel_tol: tol,
            h_init: 1e-4,
            h_min: 1e-14,
        }
    }

    /// Advance one accepted step from (t, y); returns the dense step taken.
    ///
    /// `h` is updated in place with the proposed next step size and must not
    /// exceed `h_max` on entry.
    pub fn step<F>(&self, f: &F, t: f64, y: &[f64; N], h: &mut f64) -> Result<DenseStep<N>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut h_try = *h;
        let k1 = f(t, y);
        for _attempt in 0..60 {
            let hc = h_try;
            let mut yt = [0.0; N];

            for i in 0..N {
                yt[i] = y[i] + hc * A21 * k1[i];
            }
            let k2 = f(t + hc / 5.0, &yt);
            for i in 0..N {
                yt[i] = y[i] + hc * (A31 * k1[i] + A32 * k2[i]);
            }
            let k3 = f(t + hc * 3.0 / 10.0, &yt);
            for i in 0..N {
                yt[i] = y[i] + hc * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            let k4 = f(t + hc * 4.0 / 5.0, &yt);
            for i in 0..N {
                yt[i] = y[i] + hc * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            let k5 = f(t + hc * 8.0 / 9.0, &yt);
            for i in 0..N {
                yt[i] = y[i]
                    + hc * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let k6 = f(t + hc, &yt);
            let mut y_new = [0.0; N];
            for i in 0..N {
                y_new[i] = y[i]
                    + hc * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            let k7 = f(t + hc, &y_new);

            // Scaled error norm.
            let mut err = 0.0f64;
            for i in 0..N {
                let e = hc
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
                err += (e / scale) * (e / scale);
            }
            err = (err / N as f64).sqrt();

            if err <= 1.0 {
                let mut r1 = [0.0; N];
                let mut r2 = [0.0; N];
                let mut r3 = [0.0; N];
                let mut r4 = [0.0; N];
                let mut r5 = [0.0; N];
                for i in 0..N {
                    let dy = y_new[i] - y[i];
                    let bspl = hc * k1[i] - dy;
                    r1[i] = y[i];
                    r2[i] = dy;
                    r3[i] = bspl;
                    r4[i] = dy - hc * k7[i] - bspl;
                    r5[i] = hc
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                *h = hc * fac;
                return Ok(DenseStep {
                    t0: t,
                    h: hc,
                    r1,
                    r2,
                    r3,
                    r4,
                    r5,
                });
            }

            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h_try = hc * fac;
            if h_try < self.h_min {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at t = {t:.6e} (h = {h_try:.3e})"
                )));
            }
        }
        Err(Error::IntegrationFailure(format!(
            "no acceptable step at t = {t:.6e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y integrated over one period.
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let solver: Dopri5<2> = Dopri5::new(1e-12);
        let mut t = 0.0;
        let mut y = [1.0, 0.0];
        let mut h = 0.01;
        let t_end = 2.0 * std::f64::consts::PI;
        while t < t_end {
            if t + h > t_end {
                h = t_end - t;
            }
            let step = solver.step(&rhs, t, &y, &mut h).unwrap();
            t = step.t_end();
            y = step.eval(1.0);
        }
        assert!((y[0] - 1.0).abs() < 1e-9);
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn dense_output_accuracy() {
        let rhs = |t: f64, _y: &[f64; 1]| [t.cos()];
        let solver: Dopri5<1> = Dopri5::new(1e-12);
        let mut h = 0.5;
        let y = [0.0];
        let step = solver.step(&rhs, 0.0, &y, &mut h).unwrap();
        for k in 0..=10 {
            let theta = k as f64 / 10.0;
            let t = step.t0 + theta * step.h;
            let v = step.eval(theta)[0];
            assert!((v - t.sin()).abs() < 1e-10, "theta = {theta}");
        }
    }
}
