//! Special functions and numerical kernels shared by the rest of the crate.
//!
//! Everything here is a pure function of its inputs.

mod diff;
mod elliptic;
mod ode;
mod quadrature;

use std::fmt;
use std::sync::Arc;

pub use diff::{diff_central, diff_central_fn, second_diff_central, stencil_first, stencil_second};
pub use elliptic::{jacobi_cn, jacobi_sncndn, EllipticModulus, JacobiTriple};
pub use ode::{ode_solve, OdeOptions, OdeSolution};
pub use quadrature::{quad_adaptive, Quadrature};

use crate::error::{Error, Result};

/// Closed interval of real time (bounds may be infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A real function of time together with the interval it is defined on.
#[derive(Clone)]
pub struct RealFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Interval,
}

impl RealFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: Interval) -> Self {
        Self {
            f: Arc::new(f),
            domain,
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Unchecked evaluation.
    pub fn call(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Evaluation that rejects points outside the domain and non-finite values.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!(
                "t = {t} outside {}",
                self.domain
            )));
        }
        let v = (self.f)(t);
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite value at t = {t}")));
        }
        Ok(v)
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// `n` evenly spaced samples covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}
