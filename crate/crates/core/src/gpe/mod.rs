//! Numerical treatment of the nonautonomous Gross-Pitaevskii equation
//!
//! ```text
//! i psi_t = -1/2 psi_zz + gamma(t) |psi|^2 psi + 1/2 M(t) z^2 psi
//! ```
//!
//! on a periodic grid: a spectral residual for candidate solutions and a
//! Strang split-step integrator.

mod evolve;
mod residual;
mod spectral;

pub use evolve::{
    convergence_order, split_step_evolve, split_step_evolve_observed, split_step_with,
    Coefficients, ConstantCoefficients, ConvergenceReport, EvolutionCase, EvolveOptions,
    ProfileCoefficients,
};
pub use residual::{gpe_residual, residual_from_samples, ResidualOptions};
pub use spectral::Spectral;

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::consistency::ControlState;
use crate::error::{Error, Result};

/// Largest grid the auto-sizing helper will produce.
pub const MAX_AUTO_NODES: usize = 1 << 18;

/// Uniform periodic grid on `[z_min, z_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    z_min: f64,
    z_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!("N must be a power of two >= 8, got {n}")));
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(Error::Parameter(format!("invalid z-range [{z_min}, {z_max}]")));
        }
        Ok(Self { z_min, z_max, n })
    }

    /// Smallest power-of-two grid, symmetric about 0, that holds the soliton
    /// for every given state: tails below ~1e-10 at the edges and enough
    /// wavenumbers for both the sech spectrum and the chirp `c z`.
    pub fn for_soliton(states: &[ControlState], tau0: f64) -> Result<Self> {
        if states.is_empty() || !(tau0 > 0.0) {
            return Err(Error::Parameter("auto-grid needs states and tau0 > 0".into()));
        }
        let amp_min = states.iter().map(|s| s.amp).fold(f64::INFINITY, f64::min);
        let amp_max = states.iter().map(|s| s.amp).fold(0.0, f64::max);
        let ell_max = states.iter().map(|s| s.ell.abs()).fold(0.0, f64::max);
        let c_max = states.iter().map(|s| s.c.abs()).fold(0.0, f64::max);
        let z_half = ell_max + 25.0 * tau0 / amp_min;
        let k_needed = 1.2 * (c_max * z_half + 30.0 * amp_max / tau0);
        let n_min = (2.0 * z_half * k_needed / PI).ceil();
        if !(n_min.is_finite() && n_min <= MAX_AUTO_NODES as f64) {
            return Err(Error::Resolution(format!(
                "soliton needs about {n_min:.0} nodes on [-{z_half:.3}, {z_half:.3}], above {MAX_AUTO_NODES}"
            )));
        }
        let n = (n_min as usize).next_power_of_two().max(8);
        Self::new(-z_half, z_half, n)
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn dz(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.z(j)).collect()
    }

    /// Wavenumbers in FFT order; the Nyquist entry is `-pi/dz`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length();
        let n = self.n as isize;
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n } as f64 * dk)
            .collect()
    }
}

/// Complex field sampled on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, t: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, t })
    }

    pub fn zeros(grid: Grid1D, t: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            t,
        }
    }

    /// Trapezoid (periodic) norm `int |psi|^2 dz`.
    pub fn norm(&self) -> f64 {
        self.grid.dz() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Largest `|psi|` among the four outermost nodes on each side.
    pub fn edge_amplitude(&self) -> f64 {
        let n = self.values.len();
        let k = 4.min(n / 2);
        self.values[..k]
            .iter()
            .chain(&self.values[n - k..])
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Pointwise difference norms `(max |a - b|, sqrt(int |a - b|^2))`.
pub fn compare_fields(a: &WaveField, b: &WaveField) -> Result<(f64, f64)> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    if (a.t - b.t).abs() > 1e-12 * a.t.abs().max(1.0) {
        return Err(Error::GridMismatch(format!("timestamps {} and {}", a.t, b.t)));
    }
    let mut linf = 0.0f64;
    let mut sq = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        let d = (x - y).norm();
        linf = linf.max(d);
        sq += d * d;
    }
    Ok((linf, (sq * a.grid.dz()).sqrt()))
}
