//! FFT-based operators on a periodic grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid1D;

/// Forward/inverse transforms and wavenumbers for one grid size.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.k.len()).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
            k: grid.wavenumbers(),
        }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Multiply by `symbol(k)` in Fourier space, in place.
    pub fn apply(&self, values: &mut [Complex64], symbol: impl Fn(f64) -> Complex64) {
        self.forward.process(values);
        let scale = 1.0 / values.len() as f64;
        for (v, &k) in values.iter_mut().zip(&self.k) {
            *v *= symbol(k) * scale;
        }
        self.inverse.process(values);
    }

    /// Multiply by precomputed Fourier multipliers (already including `1/N`).
    pub fn apply_table(&self, values: &mut [Complex64], table: &[Complex64]) {
        self.forward.process(values);
        for (v, m) in values.iter_mut().zip(table) {
            *v *= m;
        }
        self.inverse.process(values);
    }

    /// `d^2/dz^2` of the periodic samples.
    pub fn second_derivative(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut out = values.to_vec();
        self.apply(&mut out, |k| Complex64::new(-k * k, 0.0));
        out
    }
}
