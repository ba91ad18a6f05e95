//! Dormand-Prince 5(4) integrator with continuous (dense) output.
//!
//! Integration may run forward or backward in time. The solution keeps every
//! accepted step so it can be evaluated anywhere in the integrated span.

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrator settings. Defaults: 1e-10 absolute and relative.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 1_000_000,
            initial_step: None,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    t: f64,
    h: f64,
    r: [[f64; N]; 5],
}

/// Dense-output trajectory of an integrated system.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    t0: f64,
    t1: f64,
    y0: [f64; N],
    steps: Vec<DenseStep<N>>,
}

impl<const N: usize> OdeSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t1
    }

    /// Number of accepted steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Mesh of accepted step boundaries, in integration order.
    pub fn mesh(&self) -> Vec<f64> {
        std::iter::once(self.t0)
            .chain(self.steps.iter().map(|s| s.t + s.h))
            .collect()
    }

    pub fn final_state(&self) -> [f64; N] {
        self.steps.last().map_or(self.y0, |s| self.eval_step(s, 1.0))
    }

    fn covers(&self, t: f64) -> bool {
        let (lo, hi) = if self.t0 <= self.t1 {
            (self.t0, self.t1)
        } else {
            (self.t1, self.t0)
        };
        t >= lo && t <= hi
    }

    fn eval_step(&self, s: &DenseStep<N>, theta: f64) -> [f64; N] {
        let theta1 = 1.0 - theta;
        std::array::from_fn(|i| {
            s.r[0][i]
                + theta
                    * (s.r[1][i]
                        + theta1 * (s.r[2][i] + theta * (s.r[3][i] + theta1 * s.r[4][i])))
        })
    }

    /// State at time `t`; `None` outside the integrated span.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        if !self.covers(t) {
            return None;
        }
        if self.steps.is_empty() {
            return Some(self.y0);
        }
        let forward = self.t1 >= self.t0;
        // steps are ordered along the direction of integration
        let idx = self.steps.partition_point(|s| {
            let end = s.t + s.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let s = &self.steps[idx.min(self.steps.len() - 1)];
        let theta = ((t - s.t) / s.h).clamp(0.0, 1.0);
        Some(self.eval_step(s, theta))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1`.
pub fn ode_solve<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(opts.abs_tol > 0.0 && opts.rel_tol >= 0.0) {
        return Err(Error::Parameter("ODE tolerances must be positive".into()));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::Domain(format!("non-finite span [{t0}, {t1}]")));
    }
    let mut sol = OdeSolution {
        t0,
        t1,
        y0,
        steps: Vec::new(),
    };
    if t0 == t1 {
        return Ok(sol);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let scale = |a: &[f64; N], b: &[f64; N], i: usize| {
        opts.abs_tol + opts.rel_tol * a[i].abs().max(b[i].abs())
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    let mut h = match opts.initial_step {
        Some(h) => h.abs().min(span),
        None => {
            // Hairer's starting-step heuristic
            let d0 = (0..N).map(|i| (y[i] / scale(&y, &y, i)).powi(2)).sum::<f64>() / N as f64;
            let d1 = (0..N).map(|i| (k1[i] / scale(&y, &y, i)).powi(2)).sum::<f64>() / N as f64;
            let h0 = if d0 < 1e-10 || d1 < 1e-10 {
                1e-6
            } else {
                0.01 * (d0 / d1).sqrt()
            };
            let h0 = h0.min(span);
            let y1 = axpy(&y, dir * h0, &[(1.0, &k1)]);
            let f1 = f(t + dir * h0, &y1);
            let d2 = ((0..N)
                .map(|i| ((f1[i] - k1[i]) / scale(&y, &y, i)).powi(2))
                .sum::<f64>()
                / N as f64)
                .sqrt()
                / h0;
            let h1 = if d1.sqrt().max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.sqrt().max(d2)).powf(0.2)
            };
            (100.0 * h0).min(h1).min(span)
        }
    };

    let mut accepted = 0usize;
    let mut reject_streak = false;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if accepted + 1 > opts.max_steps {
            return Err(Error::StepBudget {
                t,
                steps: opts.max_steps,
            });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);

        let err = ((0..N)
            .map(|i| {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                (e / scale(&y, &y_new, i)).powi(2)
            })
            .sum::<f64>()
            / N as f64)
            .sqrt();

        if !err.is_finite() {
            h *= 0.25;
            reject_streak = true;
            continue;
        }

        if err <= 1.0 {
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| hs * k1[i] - ydiff[i]);
            let r = [
                y,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - hs * k7[i] - bspl[i]),
                std::array::from_fn(|i| {
                    hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i])
                }),
            ];
            sol.steps.push(DenseStep { t, h: hs, r });
            accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = if reject_streak { h.min(h * fac) } else { h * fac };
            reject_streak = false;
            if last {
                break;
            }
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            reject_streak = true;
        }
    }
    Ok(sol)
}
