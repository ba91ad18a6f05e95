//! The subcommands, as library functions returning the files they wrote.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use soliton_core::consistency::{
    control_trajectory, control_trajectory_clipped, ControlState, LambdaConvention,
};
use soliton_core::gpe::{compare_fields, split_step_evolve, EvolveOptions};
use soliton_core::modulation::{ModulationId, TrapConvention};
use soliton_core::soliton::AnalyticSoliton;
use soliton_core::Error as CoreError;

use crate::config::ScenarioConfig;
use crate::output::{self, ComparisonRow};
use crate::registry;
use crate::CliError;

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub trap: Option<TrapConvention>,
    pub lambda: Option<LambdaConvention>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ScenarioConfig) -> ScenarioConfig {
        if let Some(t) = self.trap {
            cfg.trap_convention = t;
        }
        if let Some(l) = self.lambda {
            cfg.phys.lambda = l;
        }
        cfg
    }
}

pub fn cmd_catalog(w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "modulations:")?;
    for id in ModulationId::ALL {
        writeln!(w, "  {:<20} {}", id.as_str(), id.parameter_schema())?;
    }
    writeln!(w, "scenarios:")?;
    for s in registry::registry() {
        let p = s.profile().map(|p| p.params()).unwrap_or_default();
        let params: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            w,
            "  {:<22} {:<19} t=[{}, {}] z=[{}, {}] N={} trap={} A0={} gamma0={} ell0={} {}",
            s.name,
            s.modulation.id.as_str(),
            s.time.t0,
            s.time.t1,
            s.grid.z_min,
            s.grid.z_max,
            s.grid.n,
            convention_name(s.trap_convention),
            s.phys.amp0,
            s.phys.gamma0,
            s.phys.ell0,
            params.join(" "),
        )?;
    }
    Ok(())
}

pub fn convention_name(c: TrapConvention) -> &'static str {
    match c {
        TrapConvention::Riccati => "riccati",
        TrapConvention::Paper => "paper",
    }
}

/// Control states on the scenario's time samples. Without `time.clip` a
/// singular time inside the window is an error; with it the window is cut.
pub fn scenario_states(cfg: &ScenarioConfig) -> Result<Vec<ControlState>, CliError> {
    let profile = cfg.profile()?;
    let times = cfg.times();
    if cfg.time.clip {
        let clipped = control_trajectory_clipped(&profile, &cfg.phys, &times)?;
        Ok(clipped.states().copied().collect())
    } else {
        Ok(control_trajectory(&profile, &cfg.phys, &times)?.states)
    }
}

/// Trajectory CSV, plus the trap surface when the scenario asks for it.
pub fn cmd_trajectory(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let states = scenario_states(cfg)?;
    let mut written = Vec::new();
    let path = output::output_path(out, &cfg.name, "trajectory");
    output::write_atomic(&path, &output::trajectory_csv(&states))?;
    written.push(path);
    if cfg.outputs.trap {
        let profile = cfg.profile()?;
        let grid = cfg.grid()?;
        let csv = output::trap_csv(
            &profile,
            cfg.trap_convention,
            states.iter().map(|s| s.t),
            &grid,
        );
        let path = output::output_path(out, &cfg.name, "trap");
        output::write_atomic(&path, &csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Analytic field over the scenario's (z, t) lattice.
pub fn cmd_field(cfg: &ScenarioConfig, out: &Path) -> Result<PathBuf, CliError> {
    let states = scenario_states(cfg)?;
    let sol = AnalyticSoliton::bright(&cfg.profile()?, &cfg.phys)?;
    let path = output::output_path(out, &cfg.name, "field");
    output::write_atomic(&path, &output::field_csv(&sol, &states, &cfg.grid()?))?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub rows: Vec<ComparisonRow>,
    pub bound: Option<f64>,
}

impl EvolutionRun {
    pub fn final_linf(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.linf)
    }

    /// Largest relative change of the numerical norm from its initial value.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.rows[0].norm_numeric;
        self.rows
            .iter()
            .map(|r| (r.norm_numeric - n0).abs() / n0)
            .fold(0.0, f64::max)
    }
}

/// Split-step from the analytic field at `t0`, compared with the analytic
/// field at every time sample.
pub fn run_evolution(cfg: &ScenarioConfig) -> Result<EvolutionRun, CliError> {
    let dt = cfg
        .time
        .dt
        .ok_or_else(|| CliError::Config(format!("{}: evolve needs time.dt", cfg.name)))?;
    let profile = cfg.profile()?;
    let grid = cfg.grid()?;
    let sol = AnalyticSoliton::bright(&profile, &cfg.phys)?;
    let check_edges = cfg.evolve.map_or(true, |e| e.check_edges);
    let opts = EvolveOptions {
        trap: cfg.trap_convention,
        max_edge_amplitude: if check_edges { Some(1e-10) } else { None },
        ..EvolveOptions::with_dt(dt)
    };
    let times = cfg.times();
    let mut field = sol.sample(&grid, times[0])?;
    // Grid problems visible before the run are configuration errors; an edge
    // breach that develops during the run is a failed run.
    let tau0 = cfg.phys.tau0()?;
    let checks = times.len().max(1001);
    for i in 0..checks {
        let t = times[0] + (times[times.len() - 1] - times[0]) * i as f64 / (checks - 1) as f64;
        let points = tau0 / sol.controls().amp(t) / grid.dz();
        if !(points >= opts.min_points_per_width) {
            return Err(CliError::Config(format!(
                "{}: only {points:.2} grid points across the soliton at t = {t}",
                cfg.name
            )));
        }
    }
    if let Some(limit) = opts.max_edge_amplitude {
        if field.edge_amplitude() > limit {
            return Err(CliError::Config(format!(
                "{}: initial |psi| = {:.3e} at the grid edges exceeds {limit:.1e}",
                cfg.name,
                field.edge_amplitude()
            )));
        }
    }
    let mut rows = Vec::with_capacity(times.len());
    let mut record = |field: &soliton_core::gpe::WaveField| -> Result<(), CliError> {
        let exact = sol.sample(&grid, field.t)?;
        let (linf, l2) = compare_fields(field, &exact)?;
        rows.push(ComparisonRow {
            t: field.t,
            linf,
            l2,
            norm_numeric: field.norm(),
            norm_analytic: exact.norm(),
        });
        Ok(())
    };
    record(&field)?;
    for &t in &times[1..] {
        field = split_step_evolve(&field, &cfg.phys, &profile, t, &opts).map_err(|e| match e {
            CoreError::Resolution(msg) => CliError::Validation(format!("{}: {msg}", cfg.name)),
            other => other.into(),
        })?;
        record(&field)?;
    }
    Ok(EvolutionRun {
        rows,
        bound: cfg.evolve.map(|e| e.linf_bound),
    })
}

/// Comparison CSV; a final L-infinity error above the configured bound is a
/// validation failure (reported after the file is written).
pub fn cmd_evolve(cfg: &ScenarioConfig, out: &Path) -> Result<(PathBuf, EvolutionRun), CliError> {
    let run = run_evolution(cfg)?;
    let path = output::output_path(out, &cfg.name, "comparison");
    output::write_atomic(&path, &output::comparison_csv(&run.rows))?;
    if let Some(bound) = run.bound {
        let linf = run.final_linf();
        if !(linf <= bound) {
            return Err(CliError::Validation(format!(
                "{}: final linf {linf:.3e} exceeds {bound:.1e}",
                cfg.name
            )));
        }
    }
    Ok((path, run))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lists_ids_and_figures() {
        let mut buf = Vec::new();
        cmd_catalog(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("oscillator-rational"));
        let unmod = text
            .lines()
            .find(|l| l.contains("fig-unmod-0.001 "))
            .unwrap();
        assert!(unmod.contains("m0=0.001"), "{unmod}");
        let scarf = text
            .lines()
            .find(|l| l.contains("fig-scarf-reg-trap"))
            .unwrap();
        assert!(
            scarf.contains("alpha=6") && scarf.contains("beta=4.9"),
            "{scarf}"
        );
    }

    #[test]
    fn overrides_replace_conventions() {
        let cfg = registry::find("fig-reg-osc-short").unwrap();
        let o = Overrides {
            trap: Some(TrapConvention::Paper),
            lambda: Some(LambdaConvention::Paper),
        };
        let c = o.apply(cfg.clone());
        assert_eq!(c.trap_convention, TrapConvention::Paper);
        assert_eq!(c.phys.lambda, LambdaConvention::Paper);
        assert_eq!(Overrides::default().apply(cfg.clone()), cfg);
    }

    #[test]
    fn clipped_scenario_skips_kicks() {
        let cfg = registry::find("fig-scarf-reg-long").unwrap();
        let states = scenario_states(&cfg).unwrap();
        assert!(states.len() < cfg.time.samples);
        let r = cfg.profile().unwrap().exclusion_radius();
        for s in &states {
            for k in [1.0, 3.0] {
                assert!((s.t - k * std::f64::consts::FRAC_PI_2).abs() > r);
            }
        }
        let mut strict = cfg;
        strict.time.clip = false;
        let err = scenario_states(&strict).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn evolve_requires_dt() {
        let cfg = registry::find("fig-reg-osc-short").unwrap();
        assert_eq!(run_evolution(&cfg).unwrap_err().exit_code(), 1);
    }
}
