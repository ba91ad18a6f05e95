//! Validation suite: closed forms, Riccati and amplitude identities, the
//! elliptic profile equation, full-equation residuals, oracle runs, the
//! compression and Scarf structure claims, and analytic-field invariants
//! for every registered scenario.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use soliton_core::consistency::{
    amplitude_quadrature_check, center_of_mass_residual, control_trajectory, riccati_cross_check,
    ControlState, Controls, LambdaConvention, PhysParams,
};
use soliton_core::gpe::{
    convergence_order, gpe_residual, EvolutionCase, EvolveOptions, Grid1D, ResidualOptions,
};
use soliton_core::modulation::{singular_times, ModulationProfile, TrapConvention};
use soliton_core::numerics::{
    diff_central, diff_central_fn, jacobi_cn, linspace, wrap_phase, EllipticModulus, Interval,
    Quadrature,
};
use soliton_core::soliton::{elliptic_residual, AnalyticSoliton, Snapshot};

use crate::commands::{run_evolution, scenario_states, Overrides};
use crate::config::ScenarioConfig;
use crate::registry;
use crate::CliError;

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    /// `null` in JSON when the check could not be evaluated.
    #[serde(deserialize_with = "nan_from_null")]
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Error text when the check could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    /// Passes when `value <= threshold`.
    pub fn at_most(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            check: check.into(),
            value,
            threshold,
            pass: value <= threshold,
            detail: None,
        }
    }

    /// Passes when `value >= threshold`; used for conventions that must fail.
    pub fn at_least(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            pass: value >= threshold,
            ..Self::at_most(check, value, threshold)
        }
    }

    pub fn errored(check: impl Into<String>, threshold: f64, err: impl ToString) -> Self {
        Self {
            check: check.into(),
            value: f64::NAN,
            threshold,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    fn from_result(check: impl Into<String>, value: Result<f64, CliError>, threshold: f64) -> Self {
        let check = check.into();
        match value {
            Ok(v) => Self::at_most(check, v, threshold),
            Err(e) => Self::errored(check, threshold, e),
        }
    }
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

pub fn all_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub fn caption_params() -> PhysParams {
    PhysParams::bright(0.5, -0.5).expect("caption parameters are valid")
}

/// Catalog profiles with the windows the closed-form checks run on.
pub fn catalog_windows() -> Vec<(String, ModulationProfile, Interval)> {
    let osc = Interval { lo: 0.0, hi: 2.0 };
    let scarf = Interval { lo: -1.2, hi: 1.2 };
    let constant = Interval { lo: 0.0, hi: 10.0 };
    let mut out = Vec::new();
    for m0 in [0.001, 0.01] {
        for sign in [1, -1] {
            let p = ModulationProfile::constant(m0, sign).expect("valid constant profile");
            let s = if sign > 0 { "" } else { "-minus" };
            out.push((format!("constant-{m0}{s}"), p, constant));
        }
    }
    out.push((
        "oscillator-regular".into(),
        ModulationProfile::oscillator_regular(),
        osc,
    ));
    out.push((
        "oscillator-rational".into(),
        ModulationProfile::oscillator_rational(),
        osc,
    ));
    for p in [
        ModulationProfile::scarf1_regular(6.0, 4.9).expect("valid Scarf parameters"),
        ModulationProfile::scarf1_rational(6.0, 4.9).expect("valid Scarf parameters"),
    ] {
        out.push((p.id().to_string(), p, scarf));
    }
    out
}

/// Max of `|c_closed + phi'/phi| / (1 + |c_closed|)` on 1000 points, with
/// `phi'` by 5-point differences at `h = 1e-5`.
pub fn cole_hopf_deviation(p: &ModulationProfile, win: Interval) -> Result<f64, CliError> {
    let phi = p.phi_fn();
    let mut worst = 0.0f64;
    for t in linspace(win.lo, win.hi, 1000) {
        let c = p
            .c_closed(t)
            .ok_or_else(|| CliError::Config(format!("{} has no closed form", p.id())))?;
        let fd = diff_central(&phi, t, 1e-5)? / p.phi(t);
        worst = worst.max((c + fd).abs() / (1.0 + c.abs()));
    }
    Ok(worst)
}

/// Max of `|c' - c^2 - M_closed|` on 1000 points, `c'` by 5-point differences.
pub fn riccati_identity_deviation(p: &ModulationProfile, win: Interval) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for t in linspace(win.lo, win.hi, 1000) {
        let c = p.c(t);
        let dc = diff_central_fn(|s| p.c(s), t, 1e-5);
        let m = p
            .m_closed(t)
            .ok_or_else(|| CliError::Config(format!("{} has no closed form", p.id())))?;
        worst = worst.max((dc - c * c - m).abs());
    }
    Ok(worst)
}

fn profile_checks(label: &str, p: &ModulationProfile, win: Interval) -> Vec<CheckResult> {
    let phys = caption_params().with_ell0(-4.0);
    let grid = linspace(win.lo, win.hi, 1001);
    let com = control_trajectory(p, &phys, &grid)
        .map_err(CliError::from)
        .and_then(|traj| Ok(center_of_mass_residual(&traj)?));
    vec![
        CheckResult::from_result(
            format!("cole-hopf-{label}"),
            cole_hopf_deviation(p, win),
            1e-6,
        ),
        CheckResult::from_result(
            format!("riccati-identity-{label}"),
            riccati_identity_deviation(p, win),
            1e-6,
        ),
        CheckResult::from_result(
            format!("amplitude-equivalence-{label}"),
            amplitude_quadrature_check(p, &phys, &grid).map_err(CliError::from),
            1e-7,
        ),
        CheckResult::from_result(
            format!("riccati-ode-{label}"),
            riccati_cross_check(p, win.lo, win.hi).map_err(CliError::from),
            1e-6,
        ),
        CheckResult::from_result(format!("center-of-mass-{label}"), com, 1e-6),
    ]
}

/// Uniform grid with a power-of-two spacing, so the nodes and the stencil
/// arithmetic are exact in binary.
pub fn dyadic_grid(lo: f64, hi: f64, log2_h: i32) -> Vec<f64> {
    let h = 2f64.powi(log2_h);
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

pub fn elliptic_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let sech = caption_params();
    out.push(CheckResult::from_result(
        "elliptic-sech",
        elliptic_residual(&sech, &dyadic_grid(-10.0, 10.0, -10)).map_err(CliError::from),
        1e-9,
    ));
    let near_one = EllipticModulus::new(1.0 - 1e-10).expect("valid modulus");
    let dev = linspace(-10.0, 10.0, 2001)
        .into_iter()
        .map(|t: f64| (jacobi_cn(t, near_one) - 1.0 / t.cosh()).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("cn-sech-limit", dev, 1e-5));
    for m in [0.25, 0.5, 0.75] {
        let modulus = EllipticModulus::new(m).expect("valid modulus");
        // gamma0 = -m A0 puts tau0 = 1, matching the dyadic grid spacing
        let phys = PhysParams::bright(0.5, -0.5 * m)
            .map(|p| p.with_modulus(modulus))
            .map_err(CliError::from);
        let r = phys.and_then(|p| Ok(elliptic_residual(&p, &dyadic_grid(-5.0, 5.0, -8))?));
        out.push(CheckResult::from_result(
            format!("elliptic-cn-m{m}"),
            r,
            1e-9,
        ));
    }
    out
}

pub const RESIDUAL_DT: f64 = 1e-4;

/// Time-stencil step for the residual at `t` on `grid`: [`RESIDUAL_DT`],
/// shortened so the fastest phase rotation on the grid,
/// `|a'| + |c'| z^2 / 2`, turns by at most 0.1 rad per step.
pub fn residual_step(controls: &Controls, t: f64, grid: &Grid1D) -> f64 {
    let c = controls.c(t);
    let dc = c * c + controls.profile().m(t);
    let z = grid.z_min().abs().max(grid.z_max().abs());
    let amp = controls.amp(t);
    let omega = 0.5 * controls.lambda_ell().abs() * amp * amp + 0.5 * dc.abs() * z * z;
    RESIDUAL_DT.min(0.1 / omega)
}

/// Full-equation residual of the analytic field at `t`, on a grid sized for
/// the soliton over the whole time stencil.
pub fn residual_at(
    profile: &ModulationProfile,
    phys: &PhysParams,
    t: f64,
    trap: TrapConvention,
) -> Result<f64, CliError> {
    let controls = Controls::new(profile, phys)?;
    let states: Vec<ControlState> = [-2.0, 0.0, 2.0]
        .iter()
        .map(|k| controls.state_with_phase(t + k * RESIDUAL_DT, 0.0))
        .collect();
    let grid = Grid1D::for_soliton(&states, phys.tau0()?)?;
    let dt = residual_step(&controls, t, &grid);
    let opts = ResidualOptions {
        trap,
        ..ResidualOptions::default()
    };
    Ok(gpe_residual(phys, profile, &grid, t, dt, &opts)?)
}

fn max_residual(
    profile: &ModulationProfile,
    phys: &[PhysParams],
    times: &[f64],
    trap: TrapConvention,
) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for p in phys {
        for &t in times {
            worst = worst.max(residual_at(profile, p, t, trap)?);
        }
    }
    Ok(worst)
}

/// Residual of the analytic field on the oscillator windows, under the
/// requested conventions and under both published conventions.
pub fn residual_checks(opts: &Overrides) -> Vec<CheckResult> {
    let lambda = opts.lambda.unwrap_or_default();
    let trap = opts.trap.unwrap_or_default();
    let times: Vec<f64> = (0..=6).map(|k| 0.25 * k as f64).collect();
    let phys_for = |l: LambdaConvention| -> Vec<PhysParams> {
        [0.0, -4.0]
            .iter()
            .map(|&e| caption_params().with_ell0(e).with_lambda(l))
            .collect()
    };
    let mut out = Vec::new();
    for profile in [
        ModulationProfile::oscillator_regular(),
        ModulationProfile::oscillator_rational(),
    ] {
        let id = profile.id();
        out.push(CheckResult::from_result(
            format!("gpe-residual-{id}"),
            max_residual(&profile, &phys_for(lambda), &times, trap),
            1e-5,
        ));
        for (tag, l, m) in [
            (
                "paper-lambda",
                LambdaConvention::Paper,
                TrapConvention::Riccati,
            ),
            (
                "paper-trap",
                LambdaConvention::Consistent,
                TrapConvention::Paper,
            ),
        ] {
            let name = format!("gpe-residual-{tag}-{id}");
            out.push(match max_residual(&profile, &phys_for(l), &times, m) {
                Ok(v) => CheckResult::at_least(name, v, 0.1),
                Err(e) => CheckResult::errored(name, 0.1, e),
            });
        }
    }
    let others: [(ModulationProfile, &[f64]); 3] = [
        (
            ModulationProfile::constant(0.01, 1).expect("valid"),
            &[0.0, 5.0, 10.0],
        ),
        (
            ModulationProfile::scarf1_regular(6.0, 4.9).expect("valid"),
            &[-0.3, 0.0, 0.3],
        ),
        (
            ModulationProfile::scarf1_rational(6.0, 4.9).expect("valid"),
            &[-0.3, 0.0, 0.3],
        ),
    ];
    for (profile, ts) in others {
        out.push(CheckResult::from_result(
            format!("gpe-residual-{}", profile.id()),
            max_residual(&profile, &phys_for(lambda), ts, trap),
            1e-5,
        ));
    }
    out
}

/// Registered oracle runs plus the measured temporal order.
pub fn oracle_checks(opts: &Overrides) -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = registry::evolve_scenarios()
        .into_par_iter()
        .flat_map_iter(|cfg| {
            let cfg = opts.apply(cfg);
            let bound = cfg.evolve.map_or(1e-5, |e| e.linf_bound);
            match run_evolution(&cfg) {
                Ok(run) => vec![
                    CheckResult::at_most(
                        format!("oracle-linf-{}", cfg.name),
                        run.final_linf(),
                        bound,
                    ),
                    CheckResult::at_most(
                        format!("norm-drift-{}", cfg.name),
                        run.norm_drift(),
                        1e-10,
                    ),
                ],
                Err(e) => vec![CheckResult::errored(
                    format!("oracle-linf-{}", cfg.name),
                    bound,
                    e,
                )],
            }
        })
        .collect();
    let case = EvolutionCase {
        profile: ModulationProfile::oscillator_regular(),
        phys: caption_params().with_lambda(opts.lambda.unwrap_or_default()),
        grid: Grid1D::new(-50.0, 50.0, 4096).expect("valid grid"),
        t0: 0.0,
        t1: 1.0,
        options: EvolveOptions {
            trap: opts.trap.unwrap_or_default(),
            ..EvolveOptions::default()
        },
    };
    out.push(CheckResult::from_result(
        "split-step-order-deviation",
        convergence_order(&case, &[4e-4, 2e-4, 1e-4])
            .map(|r| (r.order - 2.0).abs())
            .map_err(CliError::from),
        0.1,
    ));
    out
}

/// `A_rat / A_reg = 2 t^2 + 1` and its monotonic growth on `[0, 2]`.
pub fn compression_checks() -> Vec<CheckResult> {
    let phys = caption_params();
    let ctl = |p: ModulationProfile| Controls::new(&p, &phys);
    let (reg, rat) = match (
        ctl(ModulationProfile::oscillator_regular()),
        ctl(ModulationProfile::oscillator_rational()),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return vec![CheckResult::errored("compression-ratio", 1e-10, e)]
        }
    };
    let ts = linspace(0.0, 2.0, 1001);
    let ratios: Vec<f64> = ts.iter().map(|&t| rat.amp(t) / reg.amp(t)).collect();
    let dev = ts
        .iter()
        .zip(&ratios)
        .map(|(t, r)| (r - (2.0 * t * t + 1.0)).abs())
        .fold(0.0, f64::max);
    let non_increasing = ratios.windows(2).filter(|w| !(w[1] > w[0])).count();
    vec![
        CheckResult::at_most("compression-ratio", dev, 1e-10),
        CheckResult::at_most(
            "compression-monotone-violations",
            non_increasing as f64,
            0.0,
        ),
    ]
}

/// The two rational correction terms of the Scarf-I curvature.
pub fn scarf_correction(alpha: f64, beta: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    -2.0 * beta * c / (2.0 * alpha - 1.0 - 2.0 * beta * s)
        + 2.0 * beta * c / (2.0 * alpha + 1.0 - 2.0 * beta * s)
}

pub fn scarf_checks() -> Vec<CheckResult> {
    let (alpha, beta) = (6.0, 4.9);
    let reg = ModulationProfile::scarf1_regular(alpha, beta).expect("valid");
    let rat = ModulationProfile::scarf1_rational(alpha, beta).expect("valid");
    let mut out = Vec::new();
    for p in [&reg, &rat] {
        let dev = linspace(-1.2, 1.2, 241)
            .into_iter()
            .map(|t| match (p.m_closed(t), p.m_closed(t + TAU)) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max);
        out.push(CheckResult::at_most(
            format!("scarf-period-{}", p.id()),
            dev,
            1e-9,
        ));

        let found = singular_times(p, Interval { lo: 0.0, hi: TAU });
        let want = [FRAC_PI_2, 3.0 * FRAC_PI_2];
        let dev = if found.len() == want.len() {
            found
                .iter()
                .zip(want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        out.push(CheckResult::at_most(
            format!("scarf-singular-times-{}", p.id()),
            dev,
            1e-8,
        ));
    }
    let dev = linspace(-1.2, 1.2, 1001)
        .into_iter()
        .map(|t| ((rat.c(t) - reg.c(t)) - scarf_correction(alpha, beta, t)).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most(
        "scarf-correction-identity",
        dev,
        1e-10,
    ));

    let osc_reg = ModulationProfile::oscillator_regular();
    let osc_rat = ModulationProfile::oscillator_rational();
    let t = 20.0;
    out.push(CheckResult::at_most(
        "oscillator-trap-convergence",
        (osc_rat.m(t) / osc_reg.m(t) - 1.0).abs(),
        0.011,
    ));
    out
}

/// Invariants of one analytic snapshot: relative norm error against
/// `2 tau0`, relative peak error against `A`, and the largest phase-front
/// deviation from `-c z^2 / 2` on `|z| <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotInvariants {
    pub norm: f64,
    pub peak: f64,
    pub phase: f64,
}

pub fn snapshot_invariants(snap: &Snapshot) -> Result<SnapshotInvariants, CliError> {
    let s = snap.state;
    let w = snap.width();
    let quad = Quadrature {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    };
    let breaks: Vec<f64> = [-10.0, -3.0, -1.0, 1.0, 3.0, 10.0]
        .iter()
        .map(|k| s.ell + k * w)
        .collect();
    let norm = quad.integrate_with_breaks(
        |z| snap.density(z),
        s.ell - 40.0 * w,
        s.ell + 40.0 * w,
        &breaks,
    )?;
    let target = 2.0 * snap.tau0;
    let peak = golden_max(|z| snap.density(z), s.ell - w, s.ell + w);
    let centre = snap.psi(s.ell);
    let mut phase = 0.0f64;
    for z in linspace(-2.0, 2.0, 81) {
        let psi = snap.psi(z);
        if psi.norm() <= 1e-150 {
            continue;
        }
        let got = (psi * centre.conj()).arg();
        let want = -0.5 * s.c * (z * z - s.ell * s.ell);
        phase = phase.max(wrap_phase(got - want).abs());
    }
    Ok(SnapshotInvariants {
        norm: (norm - target).abs() / target,
        peak: (peak - s.amp).abs() / s.amp,
        phase,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if b - a <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    f1.max(f2)
}

/// Up to `k` states spread evenly through `states`.
fn spread<T: Copy>(states: &[T], k: usize) -> Vec<T> {
    if states.len() <= k {
        return states.to_vec();
    }
    (0..k)
        .map(|i| states[i * (states.len() - 1) / (k - 1)])
        .collect()
}

/// Analytic-field checks for one scenario: field invariants on up to 11 of its samples,
/// and the grid argmax of the density against `ell` (in units of `dz`).
pub fn field_checks(cfg: &ScenarioConfig) -> Vec<CheckResult> {
    let name = &cfg.name;
    let run = || -> Result<[f64; 4], CliError> {
        let states = scenario_states(cfg)?;
        let sol = AnalyticSoliton::bright(&cfg.profile()?, &cfg.phys)?;
        let grid = cfg.grid()?;
        let mut worst = [0.0f64; 4];
        for s in spread(&states, 11) {
            let snap = sol.snapshot_from(s);
            let inv = snapshot_invariants(&snap)?;
            let field = snap.sample(&grid);
            let (jmax, _) = field
                .values
                .iter()
                .enumerate()
                .fold((0, -1.0), |best, (j, v)| {
                    if v.norm_sqr() > best.1 {
                        (j, v.norm_sqr())
                    } else {
                        best
                    }
                });
            let offset = (grid.z(jmax) - s.ell).abs() / grid.dz();
            for (w, v) in worst
                .iter_mut()
                .zip([inv.norm, inv.peak, offset, inv.phase])
            {
                *w = w.max(v);
            }
        }
        Ok(worst)
    };
    let thresholds = [1e-8, 1e-9, 1.0, 1e-9];
    let labels = ["norm", "peak-value", "peak-location", "phase-curvature"];
    match run() {
        Ok(values) => labels
            .iter()
            .zip(values)
            .zip(thresholds)
            .map(|((l, v), th)| CheckResult::at_most(format!("{l}-{name}"), v, th))
            .collect(),
        Err(e) => vec![CheckResult::errored(format!("field-{name}"), 0.0, e)],
    }
}

/// Checks for one scenario: field invariants, trajectory identities and,
/// when configured, the oracle bound.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Vec<CheckResult> {
    let mut out = field_checks(cfg);
    let name = &cfg.name;
    if !cfg.time.clip {
        let amp = cfg
            .profile()
            .and_then(|p| Ok(amplitude_quadrature_check(&p, &cfg.phys, &cfg.times())?));
        out.push(CheckResult::from_result(
            format!("amplitude-equivalence-{name}"),
            amp,
            1e-7,
        ));
    }
    if cfg.evolve.is_some() {
        let bound = cfg.evolve.map_or(0.0, |e| e.linf_bound);
        out.push(match run_evolution(cfg) {
            Ok(run) => CheckResult::at_most(format!("oracle-linf-{name}"), run.final_linf(), bound),
            Err(e) => CheckResult::errored(format!("oracle-linf-{name}"), bound, e),
        });
    }
    out
}

/// Everything, in a fixed order; groups run in parallel.
pub fn run_all(opts: &Overrides) -> Vec<CheckResult> {
    type Group<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;
    let mut groups: Vec<Group> = Vec::new();
    for (label, p, win) in catalog_windows() {
        groups.push(Box::new(move || profile_checks(&label, &p, win)));
    }
    groups.push(Box::new(elliptic_checks));
    groups.push(Box::new(|| residual_checks(opts)));
    groups.push(Box::new(|| oracle_checks(opts)));
    groups.push(Box::new(compression_checks));
    groups.push(Box::new(scarf_checks));
    for cfg in registry::registry() {
        let cfg = opts.apply(cfg);
        groups.push(Box::new(move || field_checks(&cfg)));
    }
    groups.par_iter().flat_map_iter(|g| g()).collect()
}
