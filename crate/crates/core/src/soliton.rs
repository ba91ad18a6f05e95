//! Closed-form nonautonomous fields.
//!
//! ```text
//! psi(z, t) = sqrt(A) F(T) exp(i [a - c z^2 / 2]),   T = A (z - ell)
//! F(T) = cn(T / tau0, m)                              (sech at m = 1)
//! ```

use num_complex::Complex64;

use crate::consistency::{ControlState, Controls, PhysParams};
use crate::error::{Error, Result};
use crate::gpe::{Grid1D, WaveField};
use crate::modulation::ModulationProfile;
use crate::numerics::{jacobi_cn, stencil_second, EllipticModulus};

/// The analytic field for one profile and parameter set.
#[derive(Debug, Clone)]
pub struct AnalyticSoliton {
    controls: Controls,
    tau0: f64,
    modulus: EllipticModulus,
}

impl AnalyticSoliton {
    /// Any modulus `0 < m <= 1` (the cn family).
    pub fn new(profile: &ModulationProfile, phys: &PhysParams) -> Result<Self> {
        let tau0 = phys.tau0()?;
        Ok(Self {
            controls: Controls::new(profile, phys)?,
            tau0,
            modulus: phys.modulus,
        })
    }

    /// Bright soliton only: refuses `m != 1`.
    pub fn bright(profile: &ModulationProfile, phys: &PhysParams) -> Result<Self> {
        if !phys.modulus.is_one() {
            return Err(Error::Modulus(phys.modulus.value()));
        }
        Self::new(profile, phys)
    }

    pub fn controls(&self) -> &Controls {
        &self.controls
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        Ok(self.snapshot_from(self.controls.state(t)?))
    }

    /// Snapshot for an externally supplied state (e.g. a phase computed by increments).
    pub fn snapshot_from(&self, state: ControlState) -> Snapshot {
        Snapshot {
            state,
            tau0: self.tau0,
            modulus: self.modulus,
        }
    }

    pub fn sample(&self, grid: &Grid1D, t: f64) -> Result<WaveField> {
        Ok(self.snapshot(t)?.sample(grid))
    }
}

/// The field frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub state: ControlState,
    pub tau0: f64,
    pub modulus: EllipticModulus,
}

impl Snapshot {
    /// `F(A (z - ell))`, real envelope before the `sqrt(A)` factor.
    pub fn envelope(&self, z: f64) -> f64 {
        let u = self.state.amp * (z - self.state.ell) / self.tau0;
        if self.modulus.is_one() {
            1.0 / u.cosh()
        } else {
            jacobi_cn(u, self.modulus)
        }
    }

    pub fn psi(&self, z: f64) -> Complex64 {
        let s = &self.state;
        let magnitude = s.amp.sqrt() * self.envelope(z);
        // keep the two phase factors apart: a(t) can be huge near kicks
        Complex64::from_polar(magnitude, s.phase) * Complex64::from_polar(1.0, -0.5 * s.c * z * z)
    }

    pub fn density(&self, z: f64) -> f64 {
        let f = self.envelope(z);
        self.state.amp * f * f
    }

    /// Soliton width `tau0 / A`.
    pub fn width(&self) -> f64 {
        self.tau0 / self.state.amp
    }

    pub fn sample(&self, grid: &Grid1D) -> WaveField {
        WaveField {
            grid: *grid,
            values: (0..grid.len()).map(|j| self.psi(grid.z(j))).collect(),
            t: self.state.t,
        }
    }
}

/// Bright soliton `psi(z, t)`.
pub fn bright_psi(phys: &PhysParams, profile: &ModulationProfile, z: f64, t: f64) -> Result<Complex64> {
    Ok(AnalyticSoliton::bright(profile, phys)?.snapshot(t)?.psi(z))
}

/// Bright soliton sampled on every node of `grid`.
pub fn sample_field(
    phys: &PhysParams,
    profile: &ModulationProfile,
    grid: &Grid1D,
    t: f64,
) -> Result<WaveField> {
    AnalyticSoliton::bright(profile, phys)?.sample(grid, t)
}

/// `F(T) = cn(T / tau0, m)`.
pub fn cnoidal_f(t_var: f64, phys: &PhysParams) -> Result<f64> {
    let tau0 = phys.tau0()?;
    Ok(jacobi_cn(t_var / tau0, phys.modulus))
}

/// Max over interior nodes of `|F'' - lambda F + 2 kappa_m F^3|`, with
/// `kappa_m = m / tau0^2` and `F''` by the 5-point stencil.
pub fn elliptic_residual(phys: &PhysParams, tgrid: &[f64]) -> Result<f64> {
    let n = tgrid.len();
    if n < 7 {
        return Err(Error::Parameter(format!("need at least 7 nodes, got {n}")));
    }
    let h = (tgrid[n - 1] - tgrid[0]) / (n - 1) as f64;
    if !(h > 0.0) || tgrid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Parameter("elliptic residual needs a uniform increasing grid".into()));
    }
    let tau0_sq = phys.tau0_sq()?;
    let lambda = phys.lambda_ell()?;
    let kappa_m = phys.modulus.value() / tau0_sq;
    let f: Vec<f64> = tgrid
        .iter()
        .map(|&t| cnoidal_f(t, phys))
        .collect::<Result<_>>()?;
    Ok((2..n - 2)
        .map(|i| (stencil_second(&f, i, h) - lambda * f[i] + 2.0 * kappa_m * f[i].powi(3)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::LambdaConvention;
    use crate::numerics::{linspace, wrap_phase};

    fn caption() -> PhysParams {
        PhysParams::bright(0.5, -0.5).unwrap()
    }

    fn m(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    #[test]
    fn value_at_origin() {
        for p in [
            ModulationProfile::oscillator_regular(),
            ModulationProfile::constant(0.01, 1).unwrap(),
            ModulationProfile::scarf1_rational(6.0, 4.9).unwrap(),
        ] {
            let v = bright_psi(&caption(), &p, 0.0, 0.0).unwrap();
            assert!((v.norm() - 0.5f64.sqrt()).abs() < 1e-15);
            assert_eq!(v.arg(), 0.0);
        }
    }

    #[test]
    fn caption_width_is_one() {
        assert_eq!(caption().tau0().unwrap(), 1.0);
    }

    #[test]
    fn off_axis_peak_drifts_to_centre() {
        let phys = caption().with_ell0(-4.0);
        let sol = AnalyticSoliton::bright(&ModulationProfile::oscillator_regular(), &phys).unwrap();
        for t in [0.0, 1.0, 2.0, 4.0] {
            let s = sol.snapshot(t).unwrap();
            assert!((s.state.ell + 4.0 * (-t * t / 2.0).exp()).abs() < 1e-14);
            assert_eq!(s.density(s.state.ell), s.state.amp);
        }
        assert!(sol.snapshot(6.0).unwrap().state.ell.abs() < 1e-7);
    }

    #[test]
    fn bright_requires_unit_modulus() {
        let p = caption().with_modulus(m(0.5));
        let r = bright_psi(&p, &ModulationProfile::oscillator_regular(), 0.0, 0.0);
        assert_eq!(r, Err(Error::Modulus(0.5)));
    }

    #[test]
    fn cnoidal_values() {
        for mv in [0.1, 0.5, 1.0] {
            assert_eq!(cnoidal_f(0.0, &caption().with_modulus(m(mv))).unwrap(), 1.0);
        }
        let v = cnoidal_f(3.0, &caption()).unwrap();
        assert!((v - 1.0 / 3f64.cosh()).abs() < 1e-15);
        assert!((v - 0.099_327_927_419_433_2).abs() < 1e-15);
        assert_eq!(
            cnoidal_f(1.0, &caption().with_modulus(EllipticModulus::ZERO)),
            Err(Error::UndefinedWidth)
        );
    }

    /// Uniform grid with dyadic spacing, so every node is exact in binary.
    fn dyadic(lo: f64, hi: f64, log2_h: i32) -> Vec<f64> {
        let h = 2f64.powi(log2_h);
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + i as f64 * h).collect()
    }

    #[test]
    fn cnoidal_solves_elliptic_equation() {
        // gamma0 = -m A0 keeps tau0 = 1; the 5-point stencil divides
        // evaluation noise by h^2, so h = 2^-8 balances it against truncation
        let g = dyadic(-5.0, 5.0, -8);
        for mv in [0.25, 0.5, 0.75] {
            let p = PhysParams::bright(0.5, -0.5 * mv).unwrap().with_modulus(m(mv));
            assert_eq!(p.tau0().unwrap(), 1.0);
            let r = elliptic_residual(&p, &g).unwrap();
            assert!(r <= 1e-9, "m={mv}: {r}");
        }
    }

    #[test]
    fn sech_solves_elliptic_equation() {
        let g = dyadic(-10.0, 10.0, -10);
        let r = elliptic_residual(&caption(), &g).unwrap();
        assert!(r <= 1e-9, "{r}");
        assert_eq!(elliptic_residual(&caption(), &g[..5]), Err(Error::Parameter("need at least 7 nodes, got 5".into())));
    }

    #[test]
    fn published_sign_fails_elliptic_equation() {
        let g = dyadic(-10.0, 10.0, -10);
        let p = caption().with_lambda(LambdaConvention::Paper);
        let r = elliptic_residual(&p, &g).unwrap();
        // the residual is 2 F / tau0^2, largest at the peak
        assert!((r - 2.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn near_unit_modulus_continuity() {
        let p = caption().with_modulus(m(1.0 - 1e-10));
        for t in linspace(-5.0, 5.0, 101) {
            assert!((cnoidal_f(t, &p).unwrap() - 1.0 / t.cosh()).abs() < 1e-5);
        }
    }

    #[test]
    fn sampled_density_is_even() {
        let g = Grid1D::new(-20.0, 20.0, 1024).unwrap();
        let f = sample_field(&caption(), &ModulationProfile::oscillator_rational(), &g, 0.8).unwrap();
        let d = f.density();
        for j in 1..512 {
            assert!((d[j] - d[1024 - j]).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampled_norm() {
        // on [-20, 20] the tails beyond |z| = 20 are 2 (1 - tanh 10) = 8.2e-9,
        // so the truncated norm is 2 tanh(10) rather than 2 to 1e-9
        let g = Grid1D::new(-20.0, 20.0, 1024).unwrap();
        let f = sample_field(&caption(), &ModulationProfile::oscillator_regular(), &g, 0.0).unwrap();
        assert!((f.norm() - 2.0 * 10f64.tanh()).abs() < 1e-11);
        let wide = Grid1D::new(-50.0, 50.0, 4096).unwrap();
        let f = sample_field(&caption(), &ModulationProfile::oscillator_regular(), &wide, 0.0)
            .unwrap();
        assert!((f.norm() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn peak_density_matches_amplitude() {
        let g = Grid1D::new(-20.0, 20.0, 1024).unwrap();
        let f = sample_field(&caption(), &ModulationProfile::oscillator_regular(), &g, 1.0).unwrap();
        let peak = f.density().into_iter().fold(0.0, f64::max);
        assert!((peak - 0.5 * 0.5f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn phase_front_is_parabolic() {
        let phys = caption().with_phase0(1.3);
        for p in [ModulationProfile::oscillator_regular(), ModulationProfile::oscillator_rational()] {
            let sol = AnalyticSoliton::bright(&p, &phys).unwrap();
            for t in [0.25, 1.0] {
                let s = sol.snapshot(t).unwrap();
                let at0 = s.psi(0.0);
                for z in linspace(-2.0, 2.0, 81) {
                    let d = (s.psi(z) * at0.conj()).arg();
                    let want = -0.5 * s.state.c * z * z;
                    assert!(wrap_phase(d - want).abs() < 1e-9, "t={t} z={z}");
                }
            }
        }
    }
}
