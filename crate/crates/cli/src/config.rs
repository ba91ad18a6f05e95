//! Scenario configuration files (TOML).
//!
//! ```toml
//! name = "fig-reg-osc-short"
//! trap_convention = "riccati"
//!
//! [modulation]
//! id = "oscillator-regular"
//!
//! [phys]
//! amp0 = 0.5
//! gamma0 = -0.5
//!
//! [grid]
//! z_min = -20.0
//! z_max = 20.0
//! n = 2048
//!
//! [time]
//! t0 = 0.0
//! t1 = 1.0
//! samples = 101
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use soliton_core::consistency::PhysParams;
use soliton_core::gpe::Grid1D;
use soliton_core::modulation::{ModulationId, ModulationProfile, TrapConvention};
use soliton_core::numerics::{linspace, Interval, RealFunction};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub trap_convention: TrapConvention,
    pub modulation: ModulationConfig,
    pub phys: PhysParams,
    pub grid: GridConfig,
    pub time: TimeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

/// Catalog id plus whichever parameters that id takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationConfig {
    pub id: ModulationId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Polynomial coefficients of `V(t)` for the numeric profile, lowest first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dphi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    /// Split-step time step; only `evolve` needs it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Drop samples near singular times and cut the window there instead of
    /// refusing it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub clip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Largest acceptable final L-infinity distance from the analytic field.
    pub linf_bound: f64,
    #[serde(default = "yes")]
    pub check_edges: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "yes")]
    pub trajectory: bool,
    #[serde(default)]
    pub trap: bool,
    #[serde(default)]
    pub field: bool,
    #[serde(default)]
    pub comparison: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            trajectory: true,
            trap: false,
            field: false,
            comparison: false,
        }
    }
}

impl ModulationConfig {
    pub fn new(id: ModulationId) -> Self {
        Self {
            id,
            m0: None,
            sign: None,
            alpha: None,
            beta: None,
            v_coeffs: None,
            t_ref: None,
            phi0: None,
            dphi0: None,
            domain: None,
            exclusion_radius: None,
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |set: bool, key| {
            if set {
                keys.push(key)
            }
        };
        mark(self.m0.is_some(), "m0");
        mark(self.sign.is_some(), "sign");
        mark(self.alpha.is_some(), "alpha");
        mark(self.beta.is_some(), "beta");
        mark(self.v_coeffs.is_some(), "v_coeffs");
        mark(self.t_ref.is_some(), "t_ref");
        mark(self.phi0.is_some(), "phi0");
        mark(self.dphi0.is_some(), "dphi0");
        mark(self.domain.is_some(), "domain");
        keys
    }

    fn require(value: Option<f64>, key: &str, id: ModulationId) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Config(format!("modulation {id} needs `{key}`")))
    }

    pub fn build(&self) -> Result<ModulationProfile, CliError> {
        let id = self.id;
        let allowed: &[&str] = match id {
            ModulationId::Constant => &["m0", "sign"],
            ModulationId::OscillatorRegular | ModulationId::OscillatorRational => &["domain"],
            ModulationId::Scarf1Regular | ModulationId::Scarf1Rational => {
                &["alpha", "beta", "domain"]
            }
            ModulationId::Numeric => &["v_coeffs", "t_ref", "phi0", "dphi0", "domain"],
        };
        if let Some(key) = self.present().into_iter().find(|k| !allowed.contains(k)) {
            return Err(CliError::Config(format!(
                "`{key}` does not apply to modulation {id}"
            )));
        }
        let domain = self
            .domain
            .map(|[lo, hi]| Interval::new(lo, hi))
            .transpose()?;
        let mut profile = match id {
            ModulationId::Constant => ModulationProfile::constant(
                Self::require(self.m0, "m0", id)?,
                self.sign.unwrap_or(1),
            )?,
            ModulationId::OscillatorRegular => ModulationProfile::oscillator_regular(),
            ModulationId::OscillatorRational => ModulationProfile::oscillator_rational(),
            ModulationId::Scarf1Regular => ModulationProfile::scarf1_regular(
                Self::require(self.alpha, "alpha", id)?,
                Self::require(self.beta, "beta", id)?,
            )?,
            ModulationId::Scarf1Rational => ModulationProfile::scarf1_rational(
                Self::require(self.alpha, "alpha", id)?,
                Self::require(self.beta, "beta", id)?,
            )?,
            ModulationId::Numeric => {
                let coeffs = self
                    .v_coeffs
                    .clone()
                    .filter(|c| !c.is_empty())
                    .ok_or_else(|| {
                        CliError::Config("modulation numeric needs `v_coeffs`".into())
                    })?;
                let domain = domain
                    .ok_or_else(|| CliError::Config("modulation numeric needs `domain`".into()))?;
                let v = RealFunction::new(
                    move |t| coeffs.iter().rev().fold(0.0, |acc, k| acc * t + k),
                    Interval::REAL,
                );
                ModulationProfile::numeric(
                    v,
                    Self::require(self.t_ref, "t_ref", id)?,
                    Self::require(self.phi0, "phi0", id)?,
                    Self::require(self.dphi0, "dphi0", id)?,
                    domain,
                )?
            }
        };
        if let (Some(d), false) = (domain, id == ModulationId::Numeric) {
            profile = profile.with_domain(d)?;
        }
        if let Some(r) = self.exclusion_radius {
            profile = profile.with_exclusion_radius(r)?;
        }
        Ok(profile)
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// Range checks that do not need the physics built.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.trim().is_empty() {
            return Err(CliError::Config("scenario name is empty".into()));
        }
        self.modulation.build()?;
        self.phys.validate()?;
        self.phys.tau0()?;
        self.grid()?;
        let t = &self.time;
        if !(t.t0.is_finite() && t.t1.is_finite() && t.t1 >= t.t0) {
            return Err(CliError::Config(format!(
                "invalid time window [{}, {}]",
                t.t0, t.t1
            )));
        }
        if t.samples < 2 {
            return Err(CliError::Config("time.samples must be at least 2".into()));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Config(format!("time.dt must be > 0, got {dt}")));
            }
        }
        if let Some(ev) = &self.evolve {
            if !(ev.linf_bound > 0.0) {
                return Err(CliError::Config("evolve.linf_bound must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<ModulationProfile, CliError> {
        self.modulation.build()
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        Ok(Grid1D::new(self.grid.z_min, self.grid.z_max, self.grid.n)?)
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(self.time.t0, self.time.t1, self.time.samples)
    }
}
