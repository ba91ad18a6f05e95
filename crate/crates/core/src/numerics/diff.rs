//! Fourth-order central finite differences.

use super::RealFunction;
use crate::error::{Error, Result};

/// 5-point central first derivative of `f` at `t`.
pub fn diff_central(f: &RealFunction, t: f64, h: f64) -> Result<f64> {
    let dom = f.domain();
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("step must be > 0, got {h}")));
    }
    if !(dom.contains(t - 2.0 * h) && dom.contains(t + 2.0 * h)) {
        return Err(Error::Domain(format!(
            "stencil [{}, {}] leaves {}",
            t - 2.0 * h,
            t + 2.0 * h,
            dom
        )));
    }
    Ok(diff_central_fn(|x| f.call(x), t, h))
}

/// Same stencil for a bare closure, no domain bookkeeping.
pub fn diff_central_fn(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h)
}

/// 5-point central second derivative.
pub fn second_diff_central(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h))
        / (12.0 * h * h)
}

/// First derivative of uniformly spaced samples at interior index `i` (needs `2 <= i < n-2`).
pub fn stencil_first(y: &[f64], i: usize, h: f64) -> f64 {
    (8.0 * (y[i + 1] - y[i - 1]) - (y[i + 2] - y[i - 2])) / (12.0 * h)
}

/// Second derivative of uniformly spaced samples at interior index `i`.
pub fn stencil_second(y: &[f64], i: usize, h: f64) -> f64 {
    (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) / (12.0 * h * h)
}
