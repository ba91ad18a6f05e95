//! Drives the `soliton` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use soliton_cli::registry;
use soliton_cli::validate::CheckResult;

fn soliton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const OSC: &str = r#"
name = "osc"

[modulation]
id = "oscillator-regular"

[phys]
amp0 = 0.5
gamma0 = -0.5

[grid]
z_min = -20.0
z_max = 20.0
n = 256

[time]
t0 = 0.0
t1 = 2.0
samples = 201
"#;

#[test]
fn catalog_lists_everything() {
    let out = soliton(&["catalog"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("oscillator-rational"));
    for s in registry::registry() {
        assert!(text.contains(&s.name), "{}", s.name);
    }
    let unmod = text
        .lines()
        .find(|l| l.contains("fig-unmod-0.001 "))
        .unwrap();
    assert!(unmod.contains("m0=0.001"));
    let scarf = text
        .lines()
        .find(|l| l.contains("fig-scarf-reg-trap"))
        .unwrap();
    assert!(scarf.contains("alpha=6") && scarf.contains("beta=4.9"));
}

#[test]
fn trajectory_row_at_unit_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), OSC);
    let out_dir = dir.path().join("out");
    let out = soliton(&[
        "trajectory",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&out_dir.join("osc.trajectory.csv"));
    assert_eq!(header.join(","), "t,phi,c,M,A,gamma,ell,a");
    assert_eq!(rows.len(), 201);
    let r = &rows[100];
    assert_eq!(r[0], 1.0);
    assert_eq!(r[2], 1.0);
    assert!((r[4] - 0.824361).abs() < 1e-6);
    assert!(!out_dir.join("osc.trap.csv").exists());
}

#[test]
fn free_trajectory_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let body = OSC.replace("id = \"oscillator-regular\"", "id = \"constant\"\nm0 = 0.0");
    let cfg = write_config(dir.path(), &body);
    let out = soliton(&[
        "trajectory",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("osc.trajectory.csv"));
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[4] == 0.5));
}

#[test]
fn scarf_window_through_a_kick_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let body = OSC
        .replace(
            "id = \"oscillator-regular\"",
            "id = \"scarf1-regular\"\nalpha = 6.0\nbeta = 4.9",
        )
        .replace("t1 = 2.0", "t1 = 6.283185307179586");
    let cfg = write_config(dir.path(), &body);
    let out = soliton(&[
        "trajectory",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.5707963"));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        &OSC.replace("gamma0 = -0.5", "gamma0 = -0.5\nmass = 1.0"),
    );
    assert_eq!(code(&soliton(&["trajectory", "--config", &bad])), 1);
    assert_eq!(
        code(&soliton(&["trajectory", "--scenario", "fig-missing"])),
        1
    );
    assert_eq!(
        code(&soliton(&["trajectory", "--config", "/nonexistent.toml"])),
        1
    );
    assert_eq!(
        code(&soliton(&["trajectory", "--convention", "sideways"])),
        1
    );
    assert_eq!(code(&soliton(&["trajectory"])), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_soliton"))
        .arg("catalog")
        .env("SOLITON_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn trap_surface_convention() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        code(&soliton(&[
            "trajectory",
            "--scenario",
            "fig-reg-osc-trap",
            "--out",
            d
        ])),
        0
    );
    let (header, paper) = read_csv(&dir.path().join("fig-reg-osc-trap.trap.csv"));
    assert_eq!(header.join(","), "t,z,vtrap");
    // published form at t = 0: M0 + V = -1, so V_trap = -z^2 / 2
    assert_eq!(paper[0][0], 0.0);
    assert_eq!(paper[0][2], -0.5 * paper[0][1] * paper[0][1]);
    let args = [
        "trajectory",
        "--scenario",
        "fig-reg-osc-trap",
        "--convention",
        "riccati",
        "--out",
        d,
    ];
    assert_eq!(code(&soliton(&args)), 0);
    let (_, riccati) = read_csv(&dir.path().join("fig-reg-osc-trap.trap.csv"));
    assert_eq!(riccati[0][2], 0.5 * riccati[0][1] * riccati[0][1]);
}

fn field(dir: &Path, scenario: &str) -> Vec<Vec<f64>> {
    let out = soliton(&[
        "field",
        "--scenario",
        scenario,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.join(format!("{scenario}.field.csv")));
    assert_eq!(header.join(","), "t,z,re,im,density");
    rows
}

fn peak_at(rows: &[Vec<f64>], t: f64) -> (f64, f64) {
    rows.iter()
        .filter(|r| r[0] == t)
        .map(|r| (r[1], r[4]))
        .fold(
            (f64::NAN, -1.0),
            |best, p| if p.1 > best.1 { p } else { best },
        )
}

#[test]
fn offaxis_peak_starts_at_minus_four() {
    let dir = tempfile::tempdir().unwrap();
    let rows = field(dir.path(), "fig-reg-osc-offaxis");
    let cfg = registry::find("fig-reg-osc-offaxis").unwrap();
    let dz = (cfg.grid.z_max - cfg.grid.z_min) / cfg.grid.n as f64;
    let (z, _) = peak_at(&rows, 0.0);
    assert!((z + 4.0).abs() <= dz, "{z}");
}

#[test]
fn rational_peak_is_three_times_regular_at_unit_time() {
    let dir = tempfile::tempdir().unwrap();
    let (_, reg) = peak_at(&field(dir.path(), "fig-reg-osc-short"), 1.0);
    let (_, rat) = peak_at(&field(dir.path(), "fig-rat-osc-short"), 1.0);
    assert!((rat / reg - 3.0).abs() <= 1e-9, "{}", rat / reg);
}

#[test]
fn field_norms_stay_at_twice_tau0() {
    // tau0 = 1 for the caption parameters; these lattices resolve the soliton
    // at every sample, so the trapezoid sum is spectrally accurate
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["fig-reg-osc-short", "fig-rat-osc-short", "fig-unmod-0.01"] {
        let rows = field(dir.path(), scenario);
        let cfg = registry::find(scenario).unwrap();
        let dz = (cfg.grid.z_max - cfg.grid.z_min) / cfg.grid.n as f64;
        for t in cfg.times() {
            let norm: f64 = rows.iter().filter(|r| r[0] == t).map(|r| r[4]).sum::<f64>() * dz;
            assert!((norm - 2.0).abs() <= 1e-8, "{scenario} t={t}: {norm}");
        }
    }
}

#[test]
fn outputs_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = soliton(&[
            "trajectory",
            "--scenario",
            "fig-scarf-rat-trap",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for f in [
        "fig-scarf-rat-trap.trajectory.csv",
        "fig-scarf-rat-trap.trap.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn evolve_oracles_meet_their_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (scenario, bound) in [
        ("evolve-free", 1e-8),
        ("evolve-osc-reg", 1e-5),
        ("evolve-osc-rat", 1e-5),
    ] {
        let out = soliton(&["evolve", "--scenario", scenario, "--out", d]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let (header, rows) = read_csv(&dir.path().join(format!("{scenario}.comparison.csv")));
        assert_eq!(header.join(","), "t,linf,l2,norm_numeric,norm_analytic");
        let last = rows.last().unwrap();
        assert_eq!(last[0], 1.0);
        assert!(last[1] <= bound, "{scenario}: {}", last[1]);
    }
}

#[test]
fn evolve_with_published_conventions_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // the wrong trap pushes the field into the grid edges mid-run
    let out = soliton(&[
        "evolve",
        "--scenario",
        "evolve-osc-reg",
        "--convention",
        "paper",
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    // the wrong phase rate runs to the end and misses the bound
    let out = soliton(&[
        "evolve",
        "--scenario",
        "evolve-osc-reg",
        "--lambda",
        "paper",
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 2);
    let (_, rows) = read_csv(&dir.path().join("evolve-osc-reg.comparison.csv"));
    assert!(rows.last().unwrap()[1] > 0.1);
}

#[test]
fn validate_single_scenario_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&[
        "validate",
        "--scenario",
        "fig-rat-osc-offaxis",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: Vec<CheckResult> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("validation.json")).unwrap())
            .unwrap();
    assert!(report.len() >= 5);
    assert!(report.iter().all(|c| c.pass));
}

#[test]
fn validate_with_published_lambda_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&[
        "validate",
        "--all",
        "--lambda",
        "paper",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let report: Vec<CheckResult> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("validation.json")).unwrap())
            .unwrap();
    let reg = report
        .iter()
        .find(|c| c.check == "gpe-residual-oscillator-regular")
        .unwrap();
    assert!(!reg.pass && reg.value >= 0.1, "{reg:?}");
}

#[test]
fn validate_with_published_trap_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&[
        "validate",
        "--all",
        "--convention",
        "paper",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let report: Vec<CheckResult> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("validation.json")).unwrap())
            .unwrap();
    assert!(report
        .iter()
        .filter(|c| c.check.starts_with("gpe-residual-oscillator"))
        .all(|c| !c.pass));
}
