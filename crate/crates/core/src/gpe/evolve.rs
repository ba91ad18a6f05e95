//! Strang split-step Fourier integrator.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{compare_fields, Grid1D, Spectral, WaveField};
use crate::consistency::{Controls, PhysParams};
use crate::error::{Error, Result};
use crate::modulation::{ModulationProfile, TrapConvention};
use crate::soliton::AnalyticSoliton;

/// Time-dependent coefficients of the nonlinear and trap terms.
pub trait Coefficients {
    fn gamma(&self, t: f64) -> f64;
    fn trap(&self, t: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoefficients {
    pub gamma: f64,
    pub trap: f64,
}

impl Coefficients for ConstantCoefficients {
    fn gamma(&self, _t: f64) -> f64 {
        self.gamma
    }
    fn trap(&self, _t: f64) -> f64 {
        self.trap
    }
}

/// `gamma(t)` and `M(t)` of a modulation profile.
#[derive(Debug, Clone)]
pub struct ProfileCoefficients {
    controls: Controls,
    convention: TrapConvention,
}

impl ProfileCoefficients {
    pub fn new(controls: Controls, convention: TrapConvention) -> Self {
        Self {
            controls,
            convention,
        }
    }
}

impl Coefficients for ProfileCoefficients {
    fn gamma(&self, t: f64) -> f64 {
        self.controls.gamma(t)
    }
    fn trap(&self, t: f64) -> f64 {
        self.controls.trap(t, self.convention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub dt: f64,
    pub trap: TrapConvention,
    /// Minimum grid points across the soliton width `tau0 / A(t)`.
    pub min_points_per_width: f64,
    /// Largest `|psi|` tolerated at the grid edges at the start and end of
    /// the run. `None` skips the check.
    pub max_edge_amplitude: Option<f64>,
    /// Test hooks: switch off either half of the splitting.
    pub kinetic: bool,
    pub diagonal: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            trap: TrapConvention::Riccati,
            min_points_per_width: 16.0,
            max_edge_amplitude: Some(1e-10),
            kinetic: true,
            diagonal: true,
        }
    }
}

impl EvolveOptions {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }
}

fn diagonal_half_step(
    values: &mut [Complex64],
    z2: &[f64],
    gamma: f64,
    trap: f64,
    half_dt: f64,
) {
    for (v, &zz) in values.iter_mut().zip(z2) {
        let theta = -half_dt * (gamma * v.norm_sqr() + 0.5 * trap * zz);
        *v *= Complex64::from_polar(1.0, theta);
    }
}

/// Evolve `field0` to `t1` with any coefficients. `observe(step, field)` is
/// called for the initial field (step 0) and after every step.
pub fn split_step_with(
    field0: &WaveField,
    coeffs: &impl Coefficients,
    t1: f64,
    opts: &EvolveOptions,
    observe: &mut dyn FnMut(usize, &WaveField),
) -> Result<WaveField> {
    let t0 = field0.t;
    if !(opts.dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be > 0, got {}", opts.dt)));
    }
    if !(t1 >= t0) {
        return Err(Error::Parameter(format!("t1 = {t1} precedes the field time {t0}")));
    }
    let steps = (((t1 - t0) / opts.dt) * (1.0 - 1e-12)).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { (t1 - t0) / steps as f64 };

    let grid = field0.grid;
    let spectral = Spectral::new(&grid);
    let n = grid.len() as f64;
    let kinetic: Vec<Complex64> = spectral
        .wavenumbers()
        .iter()
        .map(|&k| Complex64::from_polar(1.0 / n, -0.5 * dt * k * k))
        .collect();
    let z2: Vec<f64> = grid.nodes().iter().map(|z| z * z).collect();

    let mut field = field0.clone();
    observe(0, &field);
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        if opts.diagonal {
            let tm = t + 0.25 * dt;
            diagonal_half_step(&mut field.values, &z2, coeffs.gamma(tm), coeffs.trap(tm), 0.5 * dt);
        }
        if opts.kinetic {
            spectral.apply_table(&mut field.values, &kinetic);
        }
        if opts.diagonal {
            let tm = t + 0.75 * dt;
            diagonal_half_step(&mut field.values, &z2, coeffs.gamma(tm), coeffs.trap(tm), 0.5 * dt);
        }
        field.t = if step + 1 == steps { t1 } else { t + dt };
        observe(step + 1, &field);
    }
    Ok(field)
}

fn check_edges(field: &WaveField, limit: Option<f64>) -> Result<()> {
    if let Some(limit) = limit {
        let edge = field.edge_amplitude();
        if edge > limit {
            return Err(Error::Resolution(format!(
                "|psi| = {edge:.3e} at the grid edges at t = {} exceeds {limit:.1e}",
                field.t
            )));
        }
    }
    Ok(())
}

/// Evolve under the profile's coefficients, after checking that the window
/// avoids singular times and that the grid resolves the soliton throughout.
pub fn split_step_evolve(
    field0: &WaveField,
    phys: &PhysParams,
    profile: &ModulationProfile,
    t1: f64,
    opts: &EvolveOptions,
) -> Result<WaveField> {
    split_step_evolve_observed(field0, phys, profile, t1, opts, &mut |_, _| {})
}

/// [`split_step_evolve`] with an observer, as in [`split_step_with`].
pub fn split_step_evolve_observed(
    field0: &WaveField,
    phys: &PhysParams,
    profile: &ModulationProfile,
    t1: f64,
    opts: &EvolveOptions,
    observe: &mut dyn FnMut(usize, &WaveField),
) -> Result<WaveField> {
    let t0 = field0.t;
    for t in [t0, t1] {
        profile.check_regular(t)?;
    }
    if let Some(s) = profile.singularity_between(t0, t1) {
        return Err(Error::Singularity {
            singular_time: s,
            sample: t1,
        });
    }
    let controls = Controls::new(profile, phys)?;
    let tau0 = phys.tau0()?;
    let checks = (((t1 - t0) / opts.dt).ceil() as usize).clamp(1, 100_000);
    let dz = field0.grid.dz();
    for i in 0..=checks {
        let t = t0 + (t1 - t0) * i as f64 / checks as f64;
        let points = tau0 / controls.amp(t) / dz;
        if !(points >= opts.min_points_per_width) {
            return Err(Error::Resolution(format!(
                "only {points:.2} grid points across the soliton width at t = {t} (need {})",
                opts.min_points_per_width
            )));
        }
    }
    check_edges(field0, opts.max_edge_amplitude)?;
    let coeffs = ProfileCoefficients::new(controls, opts.trap);
    let out = split_step_with(field0, &coeffs, t1, opts, observe)?;
    check_edges(&out, opts.max_edge_amplitude)?;
    Ok(out)
}

/// Analytic initial data evolved numerically over `[t0, t1]`.
#[derive(Debug, Clone)]
pub struct EvolutionCase {
    pub profile: ModulationProfile,
    pub phys: PhysParams,
    pub grid: Grid1D,
    pub t0: f64,
    pub t1: f64,
    pub options: EvolveOptions,
}

impl EvolutionCase {
    /// `(linf, l2)` distance from the analytic field at `t1` for time step `dt`.
    pub fn error(&self, dt: f64) -> Result<(f64, f64)> {
        let sol = AnalyticSoliton::bright(&self.profile, &self.phys)?;
        let start = sol.sample(&self.grid, self.t0)?;
        let opts = EvolveOptions { dt, ..self.options };
        let end = split_step_evolve(&start, &self.phys, &self.profile, self.t1, &opts)?;
        compare_fields(&end, &sol.sample(&self.grid, self.t1)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln(error)` against `ln(dt)`.
    pub order: f64,
}

/// Measure the temporal order from L-infinity errors at successively halved steps.
pub fn convergence_order(case: &EvolutionCase, dts: &[f64]) -> Result<ConvergenceReport> {
    if dts.len() < 3 {
        return Err(Error::Parameter("need at least 3 time steps".into()));
    }
    if dts.windows(2).any(|w| ((w[1] - 0.5 * w[0]) / w[1]).abs() > 1e-9) {
        return Err(Error::Parameter("each time step must halve the previous one".into()));
    }
    let errors: Vec<f64> = dts
        .par_iter()
        .map(|&dt| case.error(dt).map(|e| e.0))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ConvergenceReport {
        dts: dts.to_vec(),
        errors,
        order: sxy / sxx,
    })
}
