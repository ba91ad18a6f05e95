//! Built-in scenarios: one per published figure, plus the oracle runs.
//!
//! Physical parameters follow the figure captions. Time windows, z-ranges and
//! grid sizes are not published; the values here are our choices.

use std::f64::consts::TAU;

use soliton_core::consistency::PhysParams;
use soliton_core::modulation::{ModulationId, TrapConvention};

use crate::config::{
    EvolveConfig, GridConfig, ModulationConfig, OutputsConfig, ScenarioConfig, TimeConfig,
};

const SCARF_ALPHA: f64 = 6.0;
const SCARF_BETA: f64 = 4.9;

fn caption(ell0: f64) -> PhysParams {
    PhysParams::bright(0.5, -0.5)
        .expect("caption parameters are valid")
        .with_ell0(ell0)
}

fn scenario(
    name: &str,
    description: &str,
    modulation: ModulationConfig,
    ell0: f64,
    grid: (f64, f64, usize),
    time: (f64, f64, usize),
    outputs: OutputsConfig,
) -> ScenarioConfig {
    // trap surfaces are drawn as published, dynamics use the consistent ratio
    let trap_convention = if name.starts_with("fig-") && name.ends_with("-trap") {
        TrapConvention::Paper
    } else {
        TrapConvention::Riccati
    };
    ScenarioConfig {
        name: name.to_string(),
        description: Some(description.to_string()),
        trap_convention,
        modulation,
        phys: caption(ell0),
        grid: GridConfig {
            z_min: grid.0,
            z_max: grid.1,
            n: grid.2,
        },
        time: TimeConfig {
            t0: time.0,
            t1: time.1,
            samples: time.2,
            dt: None,
            clip: false,
        },
        evolve: None,
        outputs,
    }
}

fn constant(m0: f64) -> ModulationConfig {
    ModulationConfig {
        m0: Some(m0),
        sign: Some(1),
        ..ModulationConfig::new(ModulationId::Constant)
    }
}

fn scarf(id: ModulationId) -> ModulationConfig {
    ModulationConfig {
        alpha: Some(SCARF_ALPHA),
        beta: Some(SCARF_BETA),
        ..ModulationConfig::new(id)
    }
}

const TRAP_ONLY: OutputsConfig = OutputsConfig {
    trajectory: true,
    trap: true,
    field: false,
    comparison: false,
};

const SOLITON: OutputsConfig = OutputsConfig {
    trajectory: true,
    trap: false,
    field: true,
    comparison: false,
};

const BOTH: OutputsConfig = OutputsConfig {
    trajectory: true,
    trap: true,
    field: true,
    comparison: false,
};

/// Every registered scenario, figure scenarios first.
pub fn registry() -> Vec<ScenarioConfig> {
    let mut out = figure_scenarios();
    out.extend(evolve_scenarios());
    out
}

pub fn figure_scenarios() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for (m0, label) in [(0.001, "0.001"), (0.01, "0.01")] {
        out.push(scenario(
            &format!("fig-unmod-{label}"),
            "unmodulated trap and soliton",
            constant(m0),
            0.0,
            (-20.0, 20.0, 1024),
            (0.0, 10.0, 101),
            BOTH,
        ));
    }
    for (tag, id) in [
        ("reg", ModulationId::OscillatorRegular),
        ("rat", ModulationId::OscillatorRational),
    ] {
        let m = ModulationConfig::new(id);
        out.push(scenario(
            &format!("fig-{tag}-osc-trap"),
            "oscillator trap surface",
            m.clone(),
            0.0,
            (-20.0, 20.0, 256),
            (0.0, 2.0, 101),
            TRAP_ONLY,
        ));
        out.push(scenario(
            &format!("fig-{tag}-osc-short"),
            "oscillator soliton, short window",
            m.clone(),
            0.0,
            (-20.0, 20.0, 2048),
            (0.0, 1.0, 101),
            SOLITON,
        ));
        out.push(scenario(
            &format!("fig-{tag}-osc-long"),
            "oscillator soliton, long window",
            m.clone(),
            0.0,
            (-20.0, 20.0, 2048),
            (0.0, 2.0, 101),
            SOLITON,
        ));
        out.push(scenario(
            &format!("fig-{tag}-osc-offaxis"),
            "oscillator soliton started off axis",
            m,
            -4.0,
            (-20.0, 20.0, 2048),
            (0.0, 2.0, 101),
            SOLITON,
        ));
    }
    for (tag, id) in [
        ("reg", ModulationId::Scarf1Regular),
        ("rat", ModulationId::Scarf1Rational),
    ] {
        let mut trap = scenario(
            &format!("fig-scarf-{tag}-trap"),
            "Scarf-I trap surface, clipped at the kicks",
            scarf(id),
            0.0,
            (-20.0, 20.0, 256),
            (0.0, TAU, 201),
            TRAP_ONLY,
        );
        trap.time.clip = true;
        out.push(trap);
        let mut long = scenario(
            &format!("fig-scarf-{tag}-long"),
            "Scarf-I soliton over one period, clipped at the kicks",
            scarf(id),
            0.0,
            (-250.0, 250.0, 4096),
            (0.0, TAU, 201),
            SOLITON,
        );
        long.time.clip = true;
        out.push(long);
        out.push(scenario(
            &format!("fig-scarf-{tag}-short"),
            "Scarf-I soliton between the kicks",
            scarf(id),
            0.0,
            (-250.0, 250.0, 4096),
            (-1.2, 1.2, 121),
            SOLITON,
        ));
    }
    out
}

/// Oracle runs: split-step from the analytic field at t = 0 to t = 1.
///
/// The domain is wide enough that the soliton tails stay below 1e-10 at the
/// edges, so the periodic wrap does not contaminate the comparison.
pub fn evolve_scenarios() -> Vec<ScenarioConfig> {
    [
        ("evolve-free", constant(0.0), 1e-8),
        (
            "evolve-osc-reg",
            ModulationConfig::new(ModulationId::OscillatorRegular),
            1e-5,
        ),
        (
            "evolve-osc-rat",
            ModulationConfig::new(ModulationId::OscillatorRational),
            1e-5,
        ),
    ]
    .into_iter()
    .map(|(name, m, bound)| {
        let mut s = scenario(
            name,
            "split-step oracle against the analytic field",
            m,
            0.0,
            (-50.0, 50.0, 8192),
            (0.0, 1.0, 11),
            OutputsConfig {
                trajectory: false,
                trap: false,
                field: false,
                comparison: true,
            },
        );
        s.time.dt = Some(2e-4);
        s.evolve = Some(EvolveConfig {
            linf_bound: bound,
            check_edges: true,
        });
        s
    })
    .collect()
}

pub fn find(name: &str) -> Option<ScenarioConfig> {
    registry().into_iter().find(|s| s.name == name)
}
