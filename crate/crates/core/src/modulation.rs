//! Trap modulations defined by their time-eigenfunction.
//!
//! A profile is fixed by `phi(t)`. The phase-front curvature and the trap
//! frequency ratio follow from it:
//!
//! ```text
//! c(t) = -d/dt ln phi(t)
//! M(t) = c'(t) - c(t)^2          (equivalently phi'' = -M phi)
//! ```
//!
//! The catalog profiles also carry `v_paper`, the modulation function written
//! as `M(t) = M0 + V(t)`. That form is kept for trap-surface figures only and
//! never drives the dynamics unless [`TrapConvention::Paper`] is asked for.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ode_solve, Interval, OdeOptions, OdeSolution, RealFunction};

/// Default radius around a zero of `phi` inside which samples are refused.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.05;

/// Identifier of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulationId {
    Constant,
    OscillatorRegular,
    OscillatorRational,
    Scarf1Regular,
    Scarf1Rational,
    Numeric,
}

impl ModulationId {
    pub const ALL: [ModulationId; 6] = [
        ModulationId::Constant,
        ModulationId::OscillatorRegular,
        ModulationId::OscillatorRational,
        ModulationId::Scarf1Regular,
        ModulationId::Scarf1Rational,
        ModulationId::Numeric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModulationId::Constant => "constant",
            ModulationId::OscillatorRegular => "oscillator-regular",
            ModulationId::OscillatorRational => "oscillator-rational",
            ModulationId::Scarf1Regular => "scarf1-regular",
            ModulationId::Scarf1Rational => "scarf1-rational",
            ModulationId::Numeric => "numeric",
        }
    }

    /// Human-readable parameter schema, used by the catalog listing.
    pub fn parameter_schema(self) -> &'static str {
        match self {
            ModulationId::Constant => "m0 >= 0, sign in {+1, -1}",
            ModulationId::OscillatorRegular | ModulationId::OscillatorRational => "(none)",
            ModulationId::Scarf1Regular | ModulationId::Scarf1Rational => {
                "alpha > 1, 0 < beta < alpha - 1, domain (default [-2pi, 2pi])"
            }
            ModulationId::Numeric => {
                "v_coeffs (V(t) = sum v_k t^k), t_ref, phi0 != 0, dphi0, finite domain"
            }
        }
    }
}

impl fmt::Display for ModulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which trap-frequency ratio drives the dynamics or the trap surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapConvention {
    /// `M = c' - c^2`, consistent with the eigenfunction.
    #[default]
    Riccati,
    /// `M = M0 + V(t)` with the modulation function as published.
    Paper,
}

#[derive(Clone)]
enum Kind {
    Constant { m0: f64, sign: f64 },
    OscillatorRegular,
    OscillatorRational,
    Scarf1Regular { alpha: f64, beta: f64 },
    Scarf1Rational { alpha: f64, beta: f64 },
    Numeric(Arc<NumericPhi>),
}

struct NumericPhi {
    v: RealFunction,
    t_ref: f64,
    forward: OdeSolution<2>,
    backward: OdeSolution<2>,
}

impl NumericPhi {
    fn state(&self, t: f64) -> [f64; 2] {
        let sol = if t >= self.t_ref {
            &self.forward
        } else {
            &self.backward
        };
        sol.eval(t).unwrap_or([f64::NAN, f64::NAN])
    }
}

/// A trap modulation: eigenfunction, curvature, trap ratio and their domain.
#[derive(Clone)]
pub struct ModulationProfile {
    kind: Kind,
    domain: Interval,
    singular: Vec<f64>,
    exclusion_radius: f64,
}

impl fmt::Debug for ModulationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulationProfile")
            .field("id", &self.id())
            .field("params", &self.params())
            .field("domain", &self.domain)
            .field("singular_times", &self.singular)
            .finish()
    }
}

fn scarf_precondition(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 1.0 && beta > 0.0 && beta < alpha - 1.0) {
        return Err(Error::Parameter(format!(
            "Scarf-I requires alpha > 1 and 0 < beta < alpha - 1 (got alpha = {alpha}, beta = {beta})"
        )));
    }
    Ok(())
}

/// Points `pi/2 + k pi` inside `domain`, where `sin t = +-1`.
fn scarf_zeros(domain: Interval) -> Vec<f64> {
    let k_lo = ((domain.lo - FRAC_PI_2) / PI).ceil() as i64;
    let k_hi = ((domain.hi - FRAC_PI_2) / PI).floor() as i64;
    (k_lo..=k_hi)
        .map(|k| FRAC_PI_2 + k as f64 * PI)
        .filter(|t| domain.contains(*t))
        .collect()
}

fn default_scarf_domain() -> Interval {
    Interval {
        lo: -TAU,
        hi: TAU,
    }
}

impl ModulationProfile {
    /// Unmodulated trap: `phi = exp(-sign sqrt(M0) t)`, `c = sign sqrt(M0)`, `M = -M0`.
    pub fn constant(m0: f64, sign: i8) -> Result<Self> {
        if !(m0 >= 0.0 && m0.is_finite()) {
            return Err(Error::Domain(format!("M0 must be >= 0, got {m0}")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Parameter(format!("sign must be +1 or -1, got {sign}")));
        }
        Ok(Self::closed(Kind::Constant {
            m0,
            sign: sign as f64,
        }))
    }

    /// Gaussian eigenfunction of the time-oscillator.
    pub fn oscillator_regular() -> Self {
        Self::closed(Kind::OscillatorRegular)
    }

    /// Rational extension of the time-oscillator.
    pub fn oscillator_rational() -> Self {
        Self::closed(Kind::OscillatorRational)
    }

    pub fn scarf1_regular(alpha: f64, beta: f64) -> Result<Self> {
        scarf_precondition(alpha, beta)?;
        Self::closed(Kind::Scarf1Regular { alpha, beta }).with_domain(default_scarf_domain())
    }

    pub fn scarf1_rational(alpha: f64, beta: f64) -> Result<Self> {
        scarf_precondition(alpha, beta)?;
        Self::closed(Kind::Scarf1Rational { alpha, beta }).with_domain(default_scarf_domain())
    }

    /// Profile whose eigenfunction solves `phi'' = V(t) phi` numerically
    /// (so `M = -V`), seeded with `phi(t_ref) = phi0`, `phi'(t_ref) = dphi0`.
    ///
    /// Where `phi` decays away from `t_ref` the solve tracks a subdominant
    /// solution and `c` loses relative accuracy; seed near the smallest `|phi|`.
    pub fn numeric(
        v: RealFunction,
        t_ref: f64,
        phi0: f64,
        dphi0: f64,
        domain: Interval,
    ) -> Result<Self> {
        if phi0 == 0.0 || !phi0.is_finite() || !dphi0.is_finite() {
            return Err(Error::Parameter(format!(
                "numeric profile needs finite phi0 != 0 (got {phi0}, {dphi0})"
            )));
        }
        if !domain.is_finite() || !domain.contains(t_ref) {
            return Err(Error::Domain(format!(
                "numeric profile needs a finite domain containing t_ref = {t_ref}, got {domain}"
            )));
        }
        if !v.domain().contains_interval(&domain) {
            return Err(Error::Domain(format!(
                "V is defined on {} which does not cover {domain}",
                v.domain()
            )));
        }
        // phi can decay by many orders across the domain, and c = -phi'/phi
        // needs relative accuracy there, so the absolute floor is scaled far
        // below the seed magnitude.
        let scale = phi0.abs().max(dphi0.abs());
        let opts = OdeOptions {
            abs_tol: 1e-22 * scale,
            rel_tol: 1e-12,
            ..OdeOptions::default()
        };
        let rhs = |t: f64, y: &[f64; 2]| [y[1], v.call(t) * y[0]];
        let forward = ode_solve(rhs, [phi0, dphi0], t_ref, domain.hi, &opts)?;
        let backward = ode_solve(rhs, [phi0, dphi0], t_ref, domain.lo, &opts)?;
        let mut profile = Self {
            kind: Kind::Numeric(Arc::new(NumericPhi {
                v,
                t_ref,
                forward,
                backward,
            })),
            domain,
            singular: Vec::new(),
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        };
        profile.singular = singular_times(&profile, domain);
        Ok(profile)
    }

    fn closed(kind: Kind) -> Self {
        Self {
            kind,
            domain: Interval::REAL,
            singular: Vec::new(),
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    /// Restrict (or, for Scarf profiles, set) the time domain.
    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        match &self.kind {
            Kind::Numeric(_) => {
                if !self.domain.contains_interval(&domain) {
                    return Err(Error::Domain(format!(
                        "numeric profile was integrated on {}, cannot extend to {domain}",
                        self.domain
                    )));
                }
                self.singular.retain(|t| domain.contains(*t));
            }
            Kind::Scarf1Regular { .. } | Kind::Scarf1Rational { .. } => {
                if !domain.is_finite() {
                    return Err(Error::Domain("Scarf-I domains must be finite".into()));
                }
                self.singular = scarf_zeros(domain);
            }
            _ => {}
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("exclusion radius must be >= 0, got {radius}")));
        }
        self.exclusion_radius = radius;
        Ok(self)
    }

    pub fn id(&self) -> ModulationId {
        match self.kind {
            Kind::Constant { .. } => ModulationId::Constant,
            Kind::OscillatorRegular => ModulationId::OscillatorRegular,
            Kind::OscillatorRational => ModulationId::OscillatorRational,
            Kind::Scarf1Regular { .. } => ModulationId::Scarf1Regular,
            Kind::Scarf1Rational { .. } => ModulationId::Scarf1Rational,
            Kind::Numeric(_) => ModulationId::Numeric,
        }
    }

    /// Named real parameters of this entry.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match &self.kind {
            Kind::Constant { m0, sign } => vec![("m0", *m0), ("sign", *sign)],
            Kind::OscillatorRegular | Kind::OscillatorRational => Vec::new(),
            Kind::Scarf1Regular { alpha, beta } | Kind::Scarf1Rational { alpha, beta } => {
                vec![
                    ("alpha", *alpha),
                    ("beta", *beta),
                    ("alpha1", alpha - beta - 0.5),
                    ("beta1", alpha + beta - 0.5),
                ]
            }
            Kind::Numeric(n) => vec![("t_ref", n.t_ref)],
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Sorted zeros of `phi` inside the domain.
    pub fn singular_times(&self) -> &[f64] {
        &self.singular
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    /// Baseline `M0` for the published `M = M0 + V` form.
    pub fn m0(&self) -> f64 {
        match self.kind {
            Kind::Constant { m0, .. } => m0,
            _ => 0.0,
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant { m0, sign } => (-sign * m0.sqrt() * t).exp(),
            Kind::OscillatorRegular => PI.powf(-0.25) * (-0.5 * t * t).exp(),
            Kind::OscillatorRational => {
                (8.0 / PI.sqrt()).sqrt() * (-0.5 * t * t).exp() / (4.0 * t * t + 2.0)
            }
            Kind::Scarf1Regular { alpha, beta } => scarf_phi(*alpha, *beta, t),
            Kind::Scarf1Rational { alpha, beta } => {
                let s = t.sin();
                scarf_phi(*alpha, *beta, t) * (2.0 * alpha + 1.0 - 2.0 * beta * s)
                    / ((2.0 * alpha - 1.0 - 2.0 * beta * s) * 4.0 * beta)
            }
            Kind::Numeric(n) => n.state(t)[0],
        }
    }

    /// `d phi / dt`.
    pub fn dphi(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Numeric(n) => n.state(t)[1],
            _ => -self.c(t) * self.phi(t),
        }
    }

    /// Phase-front curvature `c = -phi'/phi`.
    pub fn c(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Numeric(n) => {
                let [p, dp] = n.state(t);
                -dp / p
            }
            _ => self.c_closed(t).expect("closed-form profile"),
        }
    }

    /// Closed-form curvature, when the entry has one.
    pub fn c_closed(&self, t: f64) -> Option<f64> {
        let v = match &self.kind {
            Kind::Constant { m0, sign } => sign * m0.sqrt(),
            Kind::OscillatorRegular => t,
            Kind::OscillatorRational => t + 8.0 * t / (4.0 * t * t + 2.0),
            Kind::Scarf1Regular { alpha, beta } => scarf_c_reg(*alpha, *beta, t),
            Kind::Scarf1Rational { alpha, beta } => {
                let (s, co) = t.sin_cos();
                scarf_c_reg(*alpha, *beta, t)
                    - 2.0 * beta * co / (2.0 * alpha - 1.0 - 2.0 * beta * s)
                    + 2.0 * beta * co / (2.0 * alpha + 1.0 - 2.0 * beta * s)
            }
            Kind::Numeric(_) => return None,
        };
        Some(v)
    }

    /// Closed-form `M = c' - c^2`, when the entry has one.
    pub fn m_closed(&self, t: f64) -> Option<f64> {
        let v = match &self.kind {
            Kind::Constant { m0, .. } => -m0,
            Kind::OscillatorRegular => 1.0 - t * t,
            Kind::OscillatorRational => {
                let q = 2.0 * t * t + 1.0;
                -t * t - 3.0 - 8.0 * (2.0 * t * t - 1.0) / (q * q)
            }
            Kind::Scarf1Regular { alpha, beta } => {
                let (s, co) = t.sin_cos();
                let sec = 1.0 / co;
                let tan = s / co;
                -(alpha * (alpha - 1.0) + beta * beta) * sec * sec
                    + beta * (2.0 * alpha - 1.0) * sec * tan
                    + alpha * alpha
            }
            Kind::Scarf1Rational { alpha, beta } => {
                let (a, b) = (*alpha, *beta);
                let (s, co) = t.sin_cos();
                let sec = 1.0 / co;
                let tan = s / co;
                let d1 = 2.0 * a - 1.0 - 2.0 * b * s;
                let d2 = 2.0 * a + 1.0 - 2.0 * b * s;
                let g1 = 2.0 * b * co / d1;
                let g2 = 2.0 * b * co / d2;
                let dg = |d: f64| (-2.0 * b * s * d + 4.0 * b * b * co * co) / (d * d);
                let c_reg = a * tan - b * sec;
                let dc_reg = a * sec * sec - b * sec * tan;
                let c = c_reg - g1 + g2;
                let dc = dc_reg - dg(d1) + dg(d2);
                dc - c * c
            }
            Kind::Numeric(_) => return None,
        };
        Some(v)
    }

    /// The modulation function `V(t)` in the published `M = M0 + V` form.
    pub fn v_paper(&self, t: f64) -> Option<f64> {
        let v = match &self.kind {
            Kind::Constant { .. } => 0.0,
            Kind::OscillatorRegular => t * t - 1.0,
            Kind::OscillatorRational => {
                let q = 4.0 * t * t + 2.0;
                t * t + 16.0 * (4.0 * t * t - 2.0) / (q * q) - 2.0
            }
            Kind::Scarf1Regular { alpha, beta } => scarf_v_reg(*alpha, *beta, t),
            Kind::Scarf1Rational { alpha, beta } => {
                let (a, b) = (*alpha, *beta);
                let d = 2.0 * a - 1.0 - 2.0 * b * t.sin();
                scarf_v_reg(a, b, t) + 2.0 * (2.0 * a - 1.0) / d
                    - 2.0 * ((2.0 * a - 1.0).powi(2) - 4.0 * b * b) / (d * d)
            }
            Kind::Numeric(n) => n.v.call(t),
        };
        Some(v)
    }

    /// Trap-frequency ratio `M(t)` under the chosen convention.
    pub fn trap_ratio(&self, t: f64, convention: TrapConvention) -> f64 {
        match convention {
            TrapConvention::Riccati => match &self.kind {
                Kind::Numeric(n) => -n.v.call(t),
                _ => self.m_closed(t).expect("closed-form profile"),
            },
            TrapConvention::Paper => self.m0() + self.v_paper(t).unwrap_or(0.0),
        }
    }

    /// Riccati-consistent `M(t)`.
    pub fn m(&self, t: f64) -> f64 {
        self.trap_ratio(t, TrapConvention::Riccati)
    }

    pub fn phi_fn(&self) -> RealFunction {
        let p = self.clone();
        RealFunction::new(move |t| p.phi(t), self.domain)
    }

    pub fn c_fn(&self) -> RealFunction {
        let p = self.clone();
        RealFunction::new(move |t| p.c(t), self.domain)
    }

    /// Nearest singular time to `t` closer than the exclusion radius, if any.
    pub fn nearby_singularity(&self, t: f64) -> Option<f64> {
        self.singular
            .iter()
            .copied()
            .find(|s| (s - t).abs() < self.exclusion_radius)
    }

    /// First singular time in the closed interval spanned by `a` and `b`.
    pub fn singularity_between(&self, a: f64, b: f64) -> Option<f64> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.singular.iter().copied().find(|s| *s >= lo && *s <= hi)
    }

    /// Ok if `t` is inside the domain and outside every exclusion zone.
    pub fn check_regular(&self, t: f64) -> Result<()> {
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!("t = {t} outside profile domain {}", self.domain)));
        }
        if let Some(s) = self.nearby_singularity(t) {
            return Err(Error::Singularity {
                singular_time: s,
                sample: t,
            });
        }
        Ok(())
    }
}

fn scarf_phi(alpha: f64, beta: f64, t: f64) -> f64 {
    let s = t.sin();
    (1.0 - s).max(0.0).powf(0.5 * (alpha - beta)) * (1.0 + s).max(0.0).powf(0.5 * (alpha + beta))
}

fn scarf_c_reg(alpha: f64, beta: f64, t: f64) -> f64 {
    let (s, co) = t.sin_cos();
    (alpha * s - beta) / co
}

fn scarf_v_reg(alpha: f64, beta: f64, t: f64) -> f64 {
    let (s, co) = t.sin_cos();
    let sec = 1.0 / co;
    (alpha * (alpha - 1.0) + beta * beta) * sec * sec - beta * (2.0 * alpha - 1.0) * sec * s / co
}

/// Locate all zeros of `phi` in `window` (clipped to the profile domain).
///
/// Zeros show up as points where `|phi|` stops decreasing and starts
/// increasing, i.e. where `c = -phi'/phi` switches from positive to negative.
/// Each candidate is bisected on the sign of `c` and kept when `|phi|` there
/// is negligible against its scale on the window. This also catches zeros of
/// even order, where `phi` touches zero without changing sign.
pub fn singular_times(profile: &ModulationProfile, window: Interval) -> Vec<f64> {
    let Some(win) = window.intersect(&profile.domain()) else {
        return Vec::new();
    };
    if !win.is_finite() || win.len() == 0.0 {
        return Vec::new();
    }
    let n = ((win.len() / 1e-3).ceil() as usize).clamp(2000, 200_000);
    let ts = crate::numerics::linspace(win.lo, win.hi, n + 1);
    let phis: Vec<f64> = ts.iter().map(|&t| profile.phi(t)).collect();
    let scale = phis
        .iter()
        .filter(|p| p.is_finite())
        .fold(0.0f64, |m, p| m.max(p.abs()));
    if scale == 0.0 {
        return Vec::new();
    }

    let mut found: Vec<f64> = Vec::new();
    let mut push = |t: f64| {
        if found.last().is_none_or(|last| (t - last).abs() > 1e-9) {
            found.push(t);
        }
    };

    for i in 0..n {
        let (a, b) = (ts[i], ts[i + 1]);
        let (pa, pb) = (phis[i], phis[i + 1]);
        if pa == 0.0 {
            push(a);
            continue;
        }
        if pa.signum() != pb.signum() && pb != 0.0 {
            push(bisect(|t| profile.phi(t).signum() == pa.signum(), a, b));
            continue;
        }
        let ca = profile.c(a);
        let cb = profile.c(b);
        if ca > 0.0 && cb < 0.0 {
            let t = bisect(|t| profile.c(t) > 0.0, a, b);
            if profile.phi(t).abs() <= 1e-6 * scale {
                push(t);
            }
        }
    }
    if phis[n] == 0.0 {
        push(ts[n]);
    }
    found
}

/// Bisect until the bracket is ~1 ulp wide; `left(t)` is true on the left part.
fn bisect(left: impl Fn(f64) -> bool, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            break;
        }
        if left(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diff_central, diff_central_fn, linspace};

    fn catalog() -> Vec<(ModulationProfile, Interval)> {
        let osc = Interval::new(0.0, 2.0).unwrap();
        let scarf = Interval::new(-1.2, 1.2).unwrap();
        vec![
            (ModulationProfile::constant(0.01, 1).unwrap(), Interval::new(0.0, 10.0).unwrap()),
            (ModulationProfile::constant(0.001, -1).unwrap(), Interval::new(0.0, 10.0).unwrap()),
            (ModulationProfile::oscillator_regular(), osc),
            (ModulationProfile::oscillator_rational(), osc),
            (ModulationProfile::scarf1_regular(6.0, 4.9).unwrap(), scarf),
            (ModulationProfile::scarf1_rational(6.0, 4.9).unwrap(), scarf),
        ]
    }

    #[test]
    fn constant_free_case() {
        for s in [1, -1] {
            let p = ModulationProfile::constant(0.0, s).unwrap();
            for t in [-3.0, 0.0, 5.0] {
                assert_eq!(p.phi(t), 1.0);
                assert_eq!(p.c(t), 0.0);
                assert_eq!(p.m(t), 0.0);
            }
        }
    }

    #[test]
    fn constant_sign_branches() {
        let p = ModulationProfile::constant(0.01, -1).unwrap();
        assert!((p.c(3.0) + 0.1).abs() < 1e-15);
        let q = ModulationProfile::constant(0.001, 1).unwrap();
        assert_eq!(q.m(7.0), -0.001);
        assert!(q.singular_times().is_empty());
        assert!(matches!(ModulationProfile::constant(-1.0, 1), Err(Error::Domain(_))));
        assert!(ModulationProfile::constant(1.0, 0).is_err());
    }

    #[test]
    fn regular_oscillator_values() {
        let p = ModulationProfile::oscillator_regular();
        assert_eq!(p.c(0.0), 0.0);
        assert_eq!(p.c(1.0), 1.0);
        assert!((p.m(2.0) + 3.0).abs() < 1e-15);
        assert_eq!(p.v_paper(2.0), Some(3.0));
    }

    #[test]
    fn rational_oscillator_values() {
        let p = ModulationProfile::oscillator_rational();
        assert_eq!(p.c(0.0), 0.0);
        assert!((p.c(1.0) - 7.0 / 3.0).abs() < 1e-15);
        assert!((p.m(0.0) - 5.0).abs() < 1e-15);
        // independent route: M = c' - c^2 with c' by central differences
        let m_fd = diff_central_fn(|t| p.c(t), 0.0, 1e-4) - p.c(0.0).powi(2);
        assert!((m_fd - 5.0).abs() < 1e-9);
    }

    #[test]
    fn scarf_values_at_origin() {
        let reg = ModulationProfile::scarf1_regular(6.0, 4.9).unwrap();
        assert!((reg.c(0.0) + 4.9).abs() < 1e-15);
        assert!((reg.m(0.0) + 18.01).abs() < 1e-12);
        assert_eq!(reg.phi(0.0), 1.0);

        let rat = ModulationProfile::scarf1_rational(6.0, 4.9).unwrap();
        // at t = 0 the rational denominators are 2a-1 = 11 and 2a+1 = 13
        let want = -4.9 - 9.8 / 11.0 + 9.8 / 13.0;
        assert!((rat.c(0.0) - want).abs() < 1e-12);
        let fd = -diff_central(&rat.phi_fn(), 0.0, 1e-5).unwrap() / rat.phi(0.0);
        assert!((fd - want).abs() < 1e-8);
        assert!(((rat.c(0.0) - reg.c(0.0)) - (-9.8 / 11.0 + 9.8 / 13.0)).abs() < 1e-12);
        // smallest rational denominator, at sin t = 1
        assert!((2.0 * 6.0 - 1.0 - 2.0 * 4.9 - 1.2f64).abs() < 1e-12);
    }

    #[test]
    fn scarf_precondition_enforced() {
        assert!(matches!(
            ModulationProfile::scarf1_regular(6.0, 5.0),
            Err(Error::Parameter(_))
        ));
        assert!(ModulationProfile::scarf1_rational(0.9, 0.1).is_err());
        assert!(ModulationProfile::scarf1_regular(6.0, -1.0).is_err());
    }

    #[test]
    fn scarf_default_domain_singularities() {
        let reg = ModulationProfile::scarf1_regular(6.0, 4.9).unwrap();
        let want = [-3.0 * FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2, 3.0 * FRAC_PI_2];
        assert_eq!(reg.singular_times().len(), 4);
        for (a, b) in reg.singular_times().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn scanned_singular_times() {
        let reg = ModulationProfile::scarf1_regular(6.0, 4.9).unwrap();
        let got = singular_times(&reg, Interval::new(0.0, TAU).unwrap());
        assert_eq!(got.len(), 2, "{got:?}");
        assert!((got[0] - FRAC_PI_2).abs() < 1e-10);
        assert!((got[1] - 3.0 * FRAC_PI_2).abs() < 1e-10);

        let rat = ModulationProfile::scarf1_rational(6.0, 4.9).unwrap();
        let got = singular_times(&rat, Interval::new(0.0, TAU).unwrap());
        assert_eq!(got.len(), 2);

        let osc = ModulationProfile::oscillator_regular();
        assert!(singular_times(&osc, Interval::new(-5.0, 5.0).unwrap()).is_empty());
        let cst = ModulationProfile::constant(0.01, 1).unwrap();
        assert!(singular_times(&cst, Interval::new(0.0, 10.0).unwrap()).is_empty());
    }

    #[test]
    fn numeric_profile_detects_simple_zeros() {
        // phi'' = -phi, phi(0) = 1, phi'(0) = 0 -> cos t, zeros at pi/2, 3pi/2
        let v = RealFunction::new(|_| -1.0, Interval::REAL);
        let p = ModulationProfile::numeric(v, 0.0, 1.0, 0.0, Interval::new(0.0, 5.0).unwrap())
            .unwrap();
        let z = p.singular_times();
        assert_eq!(z.len(), 2);
        assert!((z[0] - FRAC_PI_2).abs() < 1e-9);
        assert!((z[1] - 3.0 * FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn cole_hopf_closed_forms() {
        for (p, win) in catalog() {
            let phi = p.phi_fn();
            for t in linspace(win.lo, win.hi, 1000) {
                let c = p.c_closed(t).unwrap();
                let fd = diff_central(&phi, t, 1e-5).unwrap() / p.phi(t);
                assert!((c + fd).abs() / (1.0 + c.abs()) <= 1e-6, "{:?} t={t}", p.id());
            }
        }
    }

    #[test]
    fn riccati_identity() {
        for (p, win) in catalog() {
            for t in linspace(win.lo, win.hi, 1000) {
                let c = p.c(t);
                let dc = diff_central_fn(|s| p.c(s), t, 1e-5);
                let m = p.m_closed(t).unwrap();
                assert!((dc - c * c - m).abs() <= 1e-6, "{:?} t={t}", p.id());
            }
        }
    }

    #[test]
    fn scarf_trap_periodic() {
        for p in [
            ModulationProfile::scarf1_regular(6.0, 4.9).unwrap(),
            ModulationProfile::scarf1_rational(6.0, 4.9).unwrap(),
        ] {
            for t in linspace(-1.2, 1.2, 241) {
                let a = p.m_closed(t).unwrap();
                let b = p.m_closed(t + TAU).unwrap();
                assert!((a - b).abs() <= 1e-9, "t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn oscillator_curvature_is_odd() {
        for p in [
            ModulationProfile::oscillator_regular(),
            ModulationProfile::oscillator_rational(),
        ] {
            for t in linspace(0.0, 5.0, 101) {
                assert!((p.c(t) + p.c(-t)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rational_to_regular_ratio() {
        let reg = ModulationProfile::oscillator_regular();
        let rat = ModulationProfile::oscillator_rational();
        for t in linspace(-3.0, 3.0, 121) {
            let ratio = rat.phi(0.0) * reg.phi(t) / (rat.phi(t) * reg.phi(0.0));
            assert!((ratio - (2.0 * t * t + 1.0)).abs() <= 1e-10);
        }
    }

    #[test]
    fn numeric_matches_regular_oscillator() {
        let reg = ModulationProfile::oscillator_regular();
        let v = RealFunction::new(|t| t * t - 1.0, Interval::REAL);
        let p = ModulationProfile::numeric(
            v,
            0.0,
            PI.powf(-0.25),
            0.0,
            Interval::new(-2.0, 2.0).unwrap(),
        )
        .unwrap();
        for t in linspace(0.0, 2.0, 201) {
            assert!((p.phi(t) - reg.phi(t)).abs() < 1e-8);
        }
        assert!(p.singular_times().is_empty());
    }

    #[test]
    fn numeric_free_and_constant() {
        let p = ModulationProfile::numeric(
            RealFunction::new(|_| 0.0, Interval::REAL),
            0.0,
            1.0,
            0.0,
            Interval::new(0.0, 3.0).unwrap(),
        )
        .unwrap();
        for t in linspace(0.0, 3.0, 31) {
            assert!((p.phi(t) - 1.0).abs() < 1e-14);
            assert!(p.c(t).abs() < 1e-14);
            assert_eq!(p.m(t), 0.0);
        }
        let q = ModulationProfile::numeric(
            RealFunction::new(|_| 0.01, Interval::REAL),
            0.0,
            1.0,
            -0.1,
            Interval::new(0.0, 10.0).unwrap(),
        )
        .unwrap();
        for t in linspace(0.0, 10.0, 101) {
            assert!((q.c(t) - 0.1).abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_reproduces_catalog_curvature() {
        for (p, win) in catalog() {
            let src = p.clone();
            let v = RealFunction::new(move |t| -src.m(t), Interval::REAL);
            // seed where |phi| is smallest so the solve runs along the growing
            // solution; the other direction amplifies roundoff by (phi_max/phi_min)^2
            let t_ref = linspace(win.lo, win.hi, 2001)
                .into_iter()
                .min_by(|a, b| p.phi(*a).abs().total_cmp(&p.phi(*b).abs()))
                .unwrap();
            let num = ModulationProfile::numeric(v, t_ref, p.phi(t_ref), p.dphi(t_ref), win)
                .unwrap();
            for t in linspace(win.lo, win.hi, 301) {
                assert!((num.c(t) - p.c(t)).abs() <= 1e-7, "{:?} t={t}", p.id());
            }
        }
    }

    #[test]
    fn numeric_rejects_bad_seed() {
        let v = RealFunction::new(|_| 0.0, Interval::REAL);
        assert!(ModulationProfile::numeric(v.clone(), 0.0, 0.0, 1.0, Interval::new(0.0, 1.0).unwrap()).is_err());
        assert!(ModulationProfile::numeric(v, 0.0, 1.0, 0.0, Interval::REAL).is_err());
    }
}
