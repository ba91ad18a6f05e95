//! CSV and JSON emission. Every file is written to a temporary sibling and
//! renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use soliton_core::consistency::ControlState;
use soliton_core::gpe::Grid1D;
use soliton_core::modulation::{ModulationProfile, TrapConvention};
use soliton_core::soliton::AnalyticSoliton;

use crate::validate::CheckResult;
use crate::CliError;

pub const TRAJECTORY_HEADER: &str = "t,phi,c,M,A,gamma,ell,a";
pub const TRAP_HEADER: &str = "t,z,vtrap";
pub const FIELD_HEADER: &str = "t,z,re,im,density";
pub const COMPARISON_HEADER: &str = "t,linf,l2,norm_numeric,norm_analytic";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn output_path(out: &Path, scenario: &str, kind: &str) -> PathBuf {
    out.join(format!("{scenario}.{kind}.csv"))
}

fn row(buf: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        let _ = write!(buf, "{v:.16e}");
    }
    buf.push('\n');
}

pub fn trajectory_csv<'a>(states: impl IntoIterator<Item = &'a ControlState>) -> String {
    let mut buf = format!("{TRAJECTORY_HEADER}\n");
    for s in states {
        row(
            &mut buf,
            &[s.t, s.phi, s.c, s.m, s.amp, s.gamma, s.ell, s.phase],
        );
    }
    buf
}

/// `V_trap = M z^2 / 2` on every grid node, with `M` from `convention`.
pub fn trap_csv(
    profile: &ModulationProfile,
    convention: TrapConvention,
    times: impl IntoIterator<Item = f64>,
    grid: &Grid1D,
) -> String {
    let nodes = grid.nodes();
    let mut buf = format!("{TRAP_HEADER}\n");
    for t in times {
        let m = profile.trap_ratio(t, convention);
        for &z in &nodes {
            row(&mut buf, &[t, z, 0.5 * m * z * z]);
        }
    }
    buf
}

pub fn field_csv<'a>(
    sol: &AnalyticSoliton,
    states: impl IntoIterator<Item = &'a ControlState>,
    grid: &Grid1D,
) -> String {
    let nodes = grid.nodes();
    let mut buf = format!("{FIELD_HEADER}\n");
    for s in states {
        let snap = sol.snapshot_from(*s);
        for &z in &nodes {
            let psi = snap.psi(z);
            row(&mut buf, &[s.t, z, psi.re, psi.im, psi.norm_sqr()]);
        }
    }
    buf
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
    pub norm_numeric: f64,
    pub norm_analytic: f64,
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut buf = format!("{COMPARISON_HEADER}\n");
    for r in rows {
        row(
            &mut buf,
            &[r.t, r.linf, r.l2, r.norm_numeric, r.norm_analytic],
        );
    }
    buf
}

pub fn report_json(checks: &[CheckResult]) -> String {
    let mut s = serde_json::to_string_pretty(checks).expect("check results serialize");
    s.push('\n');
    s
}
