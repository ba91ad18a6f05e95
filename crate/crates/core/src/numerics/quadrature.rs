//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * resabs * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(roundoff);
    Segment { a, b, value, error }
}

/// Adaptive quadrature settings.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
        }
    }
}

impl Quadrature {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrate over `[a, b]` after splitting at the given interior points.
    /// Narrow features that a single 15-point rule could step over must be
    /// bracketed this way.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<f64> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::Parameter("quadrature tolerance must be positive".into()));
        }
        if a == b {
            return Ok(0.0);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("non-finite limits [{a}, {b}]")));
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

        let mut points: Vec<f64> = std::iter::once(lo)
            .chain(breaks.iter().copied().filter(|&x| x > lo && x < hi))
            .chain(std::iter::once(hi))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();

        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        for w in points.windows(2) {
            let s = gk15(&f, w[0], w[1]);
            total += s.value;
            total_err += s.error;
            heap.push(s);
        }
        if !total.is_finite() {
            return Err(Error::Domain("integrand not finite on the interval".into()));
        }

        let mut splits = 0;
        let mut frozen_err = 0.0;
        loop {
            let target = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= target {
                return Ok(sign * total);
            }
            let Some(worst) = heap.pop() else {
                break;
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                // cannot bisect further in floating point
                frozen_err += worst.error;
                if frozen_err > target {
                    break;
                }
                continue;
            }
            if splits >= self.max_subdivisions {
                heap.push(worst);
                break;
            }
            let left = gk15(&f, worst.a, mid);
            let right = gk15(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            if !total.is_finite() {
                return Err(Error::Domain("integrand not finite on the interval".into()));
            }
            heap.push(left);
            heap.push(right);
            splits += 1;
        }
        Err(Error::NonConvergence {
            tol: self.abs_tol.max(self.rel_tol * total.abs()),
            estimate: total_err,
            budget: self.max_subdivisions,
        })
    }
}

/// Integrate `f` over `[t0, t1]` to an absolute error estimate of `tol`.
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, t0: f64, t1: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0, got {tol}")));
    }
    Quadrature::absolute(tol).integrate(f, t0, t1)
}
