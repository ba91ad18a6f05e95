//! Control-parameter schedules and the consistency conditions between them.
//!
//! With reference time `t = 0` and `r(t) = phi(0)/phi(t)`:
//!
//! ```text
//! A = A0 r        gamma = gamma0 r        ell = ell0 / r
//! a = a0 + (lambda_ell / 2) * int_0^t A^2
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::{ModulationProfile, TrapConvention};
use crate::numerics::{ode_solve, stencil_first, EllipticModulus, OdeOptions, Quadrature};

/// Sign of the elliptic-equation coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaConvention {
    /// `lambda_ell = (2m - 1)/tau0^2`, the value that solves the reduced equation.
    #[default]
    Consistent,
    /// The published sign, `lambda_ell = -(2m - 1)/tau0^2`.
    Paper,
}

fn zero() -> f64 {
    0.0
}

/// Physical constants of the soliton family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    pub amp0: f64,
    pub gamma0: f64,
    #[serde(default = "zero")]
    pub ell0: f64,
    #[serde(default = "zero")]
    pub phase0: f64,
    #[serde(default = "unit_modulus")]
    pub modulus: EllipticModulus,
    #[serde(default)]
    pub lambda: LambdaConvention,
}

fn unit_modulus() -> EllipticModulus {
    EllipticModulus::ONE
}

impl PhysParams {
    /// Bright soliton (`m = 1`) with `ell0 = a0 = 0`.
    pub fn bright(amp0: f64, gamma0: f64) -> Result<Self> {
        let p = Self {
            amp0,
            gamma0,
            ell0: 0.0,
            phase0: 0.0,
            modulus: EllipticModulus::ONE,
            lambda: LambdaConvention::Consistent,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_ell0(mut self, ell0: f64) -> Self {
        self.ell0 = ell0;
        self
    }

    pub fn with_phase0(mut self, phase0: f64) -> Self {
        self.phase0 = phase0;
        self
    }

    pub fn with_modulus(mut self, m: EllipticModulus) -> Self {
        self.modulus = m;
        self
    }

    pub fn with_lambda(mut self, lambda: LambdaConvention) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amp0 > 0.0 && self.amp0.is_finite()) {
            return Err(Error::Parameter(format!("A0 must be > 0, got {}", self.amp0)));
        }
        for (name, v) in [("gamma0", self.gamma0), ("ell0", self.ell0), ("a0", self.phase0)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `tau0^2 = -m A0 / gamma0`.
    pub fn tau0_sq(&self) -> Result<f64> {
        let m = self.modulus.value();
        if m == 0.0 {
            return Err(Error::UndefinedWidth);
        }
        if !(self.gamma0 < 0.0) {
            return Err(Error::Parameter(format!(
                "bright solitons need gamma0 < 0, got {}",
                self.gamma0
            )));
        }
        Ok(-m * self.amp0 / self.gamma0)
    }

    pub fn tau0(&self) -> Result<f64> {
        Ok(self.tau0_sq()?.sqrt())
    }

    /// `kappa = -gamma0 / A0`.
    pub fn kappa(&self) -> f64 {
        -self.gamma0 / self.amp0
    }

    /// Coefficient of `F` in `F'' - lambda F + 2 kappa F^3 = 0` under the chosen convention.
    pub fn lambda_ell(&self) -> Result<f64> {
        let consistent = (2.0 * self.modulus.value() - 1.0) / self.tau0_sq()?;
        Ok(match self.lambda {
            LambdaConvention::Consistent => consistent,
            LambdaConvention::Paper => -consistent,
        })
    }
}

/// All control parameters at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlState {
    pub t: f64,
    pub phi: f64,
    pub c: f64,
    pub m: f64,
    pub amp: f64,
    pub gamma: f64,
    pub ell: f64,
    pub phase: f64,
}

/// Pointwise evaluator of the schedules for one profile and parameter set.
#[derive(Debug, Clone)]
pub struct Controls {
    profile: ModulationProfile,
    phys: PhysParams,
    phi_ref: f64,
    lambda_ell: f64,
    quad: Quadrature,
}

impl Controls {
    pub fn new(profile: &ModulationProfile, phys: &PhysParams) -> Result<Self> {
        phys.validate()?;
        profile.check_regular(0.0)?;
        let phi_ref = profile.phi(0.0);
        if !(phi_ref.is_finite() && phi_ref != 0.0) {
            return Err(Error::Domain(format!("phi(0) = {phi_ref} is not usable as reference")));
        }
        Ok(Self {
            profile: profile.clone(),
            phys: *phys,
            phi_ref,
            lambda_ell: phys.lambda_ell()?,
            quad: Quadrature {
                abs_tol: 1e-300,
                rel_tol: 1e-13,
                max_subdivisions: 4000,
            },
        })
    }

    pub fn profile(&self) -> &ModulationProfile {
        &self.profile
    }

    pub fn phys(&self) -> &PhysParams {
        &self.phys
    }

    pub fn lambda_ell(&self) -> f64 {
        self.lambda_ell
    }

    /// `phi(0)/phi(t)`.
    pub fn ratio(&self, t: f64) -> f64 {
        self.phi_ref / self.profile.phi(t)
    }

    pub fn amp(&self, t: f64) -> f64 {
        self.phys.amp0 * self.ratio(t)
    }

    pub fn gamma(&self, t: f64) -> f64 {
        self.phys.gamma0 * self.ratio(t)
    }

    pub fn ell(&self, t: f64) -> f64 {
        self.phys.ell0 * (self.profile.phi(t) / self.phi_ref)
    }

    pub fn c(&self, t: f64) -> f64 {
        self.profile.c(t)
    }

    pub fn trap(&self, t: f64, convention: TrapConvention) -> f64 {
        self.profile.trap_ratio(t, convention)
    }

    /// `(lambda_ell/2) int_{t0}^{t1} A^2`. The path must avoid singular times.
    pub fn phase_increment(&self, t0: f64, t1: f64) -> Result<f64> {
        if t0 == t1 {
            return Ok(0.0);
        }
        if let Some(s) = self.profile.singularity_between(t0, t1) {
            return Err(Error::Singularity {
                singular_time: s,
                sample: t1,
            });
        }
        let amp0 = self.phys.amp0;
        let integral = self.quad.integrate(
            |s| {
                let a = amp0 * self.ratio(s);
                a * a
            },
            t0,
            t1,
        )?;
        Ok(0.5 * self.lambda_ell * integral)
    }

    /// `a(t)` referenced to `a(0) = a0`.
    pub fn phase(&self, t: f64) -> Result<f64> {
        Ok(self.phys.phase0 + self.phase_increment(0.0, t)?)
    }

    /// Full state at `t`, with `M` Riccati-consistent.
    pub fn state(&self, t: f64) -> Result<ControlState> {
        self.profile.check_regular(t)?;
        Ok(self.state_with_phase(t, self.phase(t)?))
    }

    /// State at `t` with a caller-supplied phase `a`.
    pub fn state_with_phase(&self, t: f64, phase: f64) -> ControlState {
        let phi = self.profile.phi(t);
        let r = self.phi_ref / phi;
        ControlState {
            t,
            phi,
            c: self.profile.c(t),
            m: self.profile.m(t),
            amp: self.phys.amp0 * r,
            gamma: self.phys.gamma0 * r,
            ell: self.phys.ell0 * (phi / self.phi_ref),
            phase,
        }
    }
}

/// Control parameters sampled on a sorted time grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlTrajectory {
    pub states: Vec<ControlState>,
}

impl ControlTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

fn check_sorted(tgrid: &[f64]) -> Result<()> {
    if tgrid.is_empty() {
        return Err(Error::Parameter("empty time grid".into()));
    }
    if tgrid.iter().any(|t| !t.is_finite()) || tgrid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("time grid must be finite and sorted".into()));
    }
    Ok(())
}

/// Sample all schedules on `tgrid`, with `a(t)` accumulated outward from `t0`
/// (where `a = a_start`) segment by segment.
fn build(controls: &Controls, tgrid: &[f64], t0: f64, a_start: f64) -> Result<ControlTrajectory> {
    let mut phases = vec![0.0; tgrid.len()];
    let split = tgrid.partition_point(|&t| t < t0);
    let mut a = a_start;
    let mut prev = t0;
    for i in split..tgrid.len() {
        a += controls.phase_increment(prev, tgrid[i])?;
        phases[i] = a;
        prev = tgrid[i];
    }
    let mut a = a_start;
    let mut prev = t0;
    for i in (0..split).rev() {
        a += controls.phase_increment(prev, tgrid[i])?;
        phases[i] = a;
        prev = tgrid[i];
    }
    Ok(ControlTrajectory {
        states: tgrid
            .iter()
            .zip(phases)
            .map(|(&t, a)| controls.state_with_phase(t, a))
            .collect(),
    })
}

/// Schedules on `tgrid`. Every sample must be regular and the grid span must
/// contain the reference time 0 without crossing a singular time.
pub fn control_trajectory(
    profile: &ModulationProfile,
    phys: &PhysParams,
    tgrid: &[f64],
) -> Result<ControlTrajectory> {
    check_sorted(tgrid)?;
    let controls = Controls::new(profile, phys)?;
    let (lo, hi) = (tgrid[0], tgrid[tgrid.len() - 1]);
    if !(lo <= 0.0 && 0.0 <= hi) {
        return Err(Error::Domain(format!(
            "time grid [{lo}, {hi}] must contain the reference time 0"
        )));
    }
    for &t in tgrid {
        profile.check_regular(t)?;
    }
    if let Some(s) = profile.singularity_between(lo, hi) {
        let sample = if s > 0.0 {
            tgrid[tgrid.partition_point(|&t| t < s).min(tgrid.len() - 1)]
        } else {
            tgrid[tgrid.partition_point(|&t| t <= s).saturating_sub(1)]
        };
        return Err(Error::Singularity {
            singular_time: s,
            sample,
        });
    }
    build(&controls, tgrid, 0.0, phys.phase0)
}

/// Trajectory split into singularity-free pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClippedTrajectory {
    pub segments: Vec<ControlTrajectory>,
    /// Samples dropped because they fall inside an exclusion zone.
    pub excluded: Vec<f64>,
}

impl ClippedTrajectory {
    pub fn states(&self) -> impl Iterator<Item = &ControlState> {
        self.segments.iter().flat_map(|s| s.states.iter())
    }
}

/// Like [`control_trajectory`], but samples inside exclusion zones are
/// dropped and the grid is cut at every singular time.
///
/// `a(t)` diverges across a kick, so it cannot be carried from one segment to
/// the next. Segments that do not contain `t = 0` restart the phase at `a0`
/// on their sample closest to 0; a constant phase offset is a symmetry of
/// the field equation, so each segment is still an exact solution.
pub fn control_trajectory_clipped(
    profile: &ModulationProfile,
    phys: &PhysParams,
    tgrid: &[f64],
) -> Result<ClippedTrajectory> {
    check_sorted(tgrid)?;
    let controls = Controls::new(profile, phys)?;
    let mut out = ClippedTrajectory::default();
    let mut pieces: Vec<Vec<f64>> = vec![Vec::new()];
    let cuts = profile.singular_times();
    let mut next_cut = 0;
    for &t in tgrid {
        if !profile.domain().contains(t) {
            return Err(Error::Domain(format!(
                "t = {t} outside profile domain {}",
                profile.domain()
            )));
        }
        while next_cut < cuts.len() && cuts[next_cut] < t {
            next_cut += 1;
            if !pieces.last().unwrap().is_empty() {
                pieces.push(Vec::new());
            }
        }
        if profile.nearby_singularity(t).is_some() {
            out.excluded.push(t);
        } else {
            pieces.last_mut().unwrap().push(t);
        }
    }
    for piece in pieces.into_iter().filter(|p| !p.is_empty()) {
        let (lo, hi) = (piece[0], piece[piece.len() - 1]);
        let t0 = if lo <= 0.0 && 0.0 <= hi && profile.singularity_between(lo.min(0.0), hi.max(0.0)).is_none() {
            0.0
        } else if hi < 0.0 {
            hi
        } else {
            lo
        };
        out.segments.push(build(&controls, &piece, t0, phys.phase0)?);
    }
    Ok(out)
}

/// Max over `tgrid` of `|A0 exp(int_0^t c) - A0 phi(0)/phi(t)| / A(t)`.
pub fn amplitude_quadrature_check(
    profile: &ModulationProfile,
    phys: &PhysParams,
    tgrid: &[f64],
) -> Result<f64> {
    let traj = control_trajectory(profile, phys, tgrid)?;
    let quad = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    };
    let c = |t: f64| profile.c(t);
    let split = tgrid.partition_point(|&t| t < 0.0);
    let mut logs = vec![0.0; tgrid.len()];
    let (mut acc, mut prev) = (0.0, 0.0);
    for i in split..tgrid.len() {
        acc += quad.integrate(c, prev, tgrid[i])?;
        logs[i] = acc;
        prev = tgrid[i];
    }
    let (mut acc, mut prev) = (0.0, 0.0);
    for i in (0..split).rev() {
        acc += quad.integrate(c, prev, tgrid[i])?;
        logs[i] = acc;
        prev = tgrid[i];
    }
    Ok(traj
        .states
        .iter()
        .zip(logs)
        .map(|(s, l)| (phys.amp0 * l.exp() - s.amp).abs() / s.amp)
        .fold(0.0, f64::max))
}

/// Max over interior samples of `|l' + c l|`, with `l'` by the 5-point stencil.
pub fn center_of_mass_residual(traj: &ControlTrajectory) -> Result<f64> {
    let n = traj.len();
    if n < 5 {
        return Err(Error::Parameter(format!("need at least 5 samples, got {n}")));
    }
    let ts = traj.times();
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    if ts
        .windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0))
    {
        return Err(Error::Parameter("center-of-mass residual needs a uniform grid".into()));
    }
    let ell: Vec<f64> = traj.states.iter().map(|s| s.ell).collect();
    Ok((2..n - 2)
        .map(|i| (stencil_first(&ell, i, h) + traj.states[i].c * ell[i]).abs())
        .fold(0.0, f64::max))
}

/// Integrate `c' = c^2 + M` from `c(t0)` and report the largest deviation from
/// the profile's curvature on a 1001-point grid of `[t0, t1]`.
pub fn riccati_cross_check(profile: &ModulationProfile, t0: f64, t1: f64) -> Result<f64> {
    for t in [t0, t1] {
        profile.check_regular(t)?;
    }
    if let Some(s) = profile.singularity_between(t0, t1) {
        return Err(Error::Singularity {
            singular_time: s,
            sample: t1,
        });
    }
    let sol = ode_solve(
        |t, y: &[f64; 1]| [y[0] * y[0] + profile.m(t)],
        [profile.c(t0)],
        t0,
        t1,
        &OdeOptions::with_tol(1e-12),
    )?;
    Ok(crate::numerics::linspace(t0, t1, 1001)
        .into_iter()
        .map(|t| {
            let y = sol.eval(t).map_or(f64::NAN, |y| y[0]);
            (y - profile.c(t)).abs()
        })
        .fold(0.0, f64::max))
}
