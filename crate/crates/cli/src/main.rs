use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use soliton_cli::commands::{self, Overrides};
use soliton_cli::config::ScenarioConfig;
use soliton_cli::validate::{self, CheckResult};
use soliton_cli::{output, registry, CliError};
use soliton_core::consistency::LambdaConvention;
use soliton_core::modulation::TrapConvention;

/// Thread count for parallel runs; unset means one per core.
const THREADS_ENV: &str = "SOLITON_THREADS";

#[derive(Parser)]
#[command(
    name = "soliton",
    version,
    about = "Nonautonomous bright solitons in modulated traps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List modulation ids, their parameters and the registered scenarios.
    Catalog,
    /// Write the control schedules (and trap surface) for a scenario.
    Trajectory(RunArgs),
    /// Write the analytic density surface for a scenario.
    Field(RunArgs),
    /// Run the validation suite and write a JSON report.
    Validate(RunArgs),
    /// Split-step a scenario from its analytic initial field.
    Evolve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with_all = ["scenario", "all"])]
    config: Option<PathBuf>,
    /// Registered scenario name.
    #[arg(long, conflicts_with = "all")]
    scenario: Option<String>,
    /// Every applicable registered scenario.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Trap-frequency ratio to use, overriding the scenario.
    #[arg(long, value_enum)]
    convention: Option<Convention>,
    /// Phase-rate sign convention, overriding the scenario.
    #[arg(long, value_enum)]
    lambda: Option<Lambda>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Paper,
    Riccati,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lambda {
    Consistent,
    Paper,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            trap: self.convention.map(|c| match c {
                Convention::Paper => TrapConvention::Paper,
                Convention::Riccati => TrapConvention::Riccati,
            }),
            lambda: self.lambda.map(|l| match l {
                Lambda::Consistent => LambdaConvention::Consistent,
                Lambda::Paper => LambdaConvention::Paper,
            }),
        }
    }

    /// The selected scenarios, overrides applied. `--all` keeps those for
    /// which `keep` holds.
    fn scenarios(
        &self,
        keep: impl Fn(&ScenarioConfig) -> bool,
    ) -> Result<Vec<ScenarioConfig>, CliError> {
        let picked = if let Some(path) = &self.config {
            vec![ScenarioConfig::load(path)?]
        } else if let Some(name) = &self.scenario {
            vec![registry::find(name)
                .ok_or_else(|| CliError::Config(format!("no registered scenario `{name}`")))?]
        } else if self.all {
            registry::registry()
                .into_iter()
                .filter(|s| keep(s))
                .collect()
        } else {
            return Err(CliError::Config(
                "give --config, --scenario or --all".into(),
            ));
        };
        let o = self.overrides();
        Ok(picked.into_iter().map(|s| o.apply(s)).collect())
    }
}

/// Run `f` on every scenario in parallel, reporting each outcome; the exit
/// code is the most severe one.
fn for_each(
    scenarios: Vec<ScenarioConfig>,
    f: impl Fn(&ScenarioConfig) -> Result<Vec<PathBuf>, CliError> + Sync,
) -> ExitCode {
    let results: Vec<_> = scenarios
        .par_iter()
        .map(|s| (s.name.clone(), f(s)))
        .collect();
    let mut code = 0;
    for (name, r) in results {
        match r {
            Ok(paths) => {
                for p in paths {
                    println!("{name}: wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("{name}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code as u8)
}

fn validate(args: &RunArgs) -> Result<ExitCode, CliError> {
    let checks: Vec<CheckResult> = if args.config.is_none() && args.scenario.is_none() {
        validate::run_all(&args.overrides())
    } else {
        args.scenarios(|_| true)?
            .iter()
            .flat_map(validate::validate_scenario)
            .collect()
    };
    let path = args.out.join("validation.json");
    output::write_atomic(&path, &output::report_json(&checks))?;
    let mut stdout = io::stdout().lock();
    for c in &checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        let _ = writeln!(
            stdout,
            "{verdict}  {:<48} {:>12.4e}  (threshold {:.1e})",
            c.check, c.value, c.threshold
        );
        if let Some(d) = &c.detail {
            let _ = writeln!(stdout, "      {d}");
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(
        stdout,
        "{} checks, {failed} failed; report at {}",
        checks.len(),
        path.display()
    );
    Ok(ExitCode::from(if failed == 0 { 0 } else { 2 }))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Catalog => {
            commands::cmd_catalog(&mut io::stdout().lock()).map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trajectory(args) => {
            let s = args.scenarios(|s| s.name.starts_with("fig-"))?;
            Ok(for_each(s, |c| commands::cmd_trajectory(c, &args.out)))
        }
        Command::Field(args) => {
            let s = args.scenarios(|s| s.outputs.field)?;
            Ok(for_each(s, |c| {
                commands::cmd_field(c, &args.out).map(|p| vec![p])
            }))
        }
        Command::Evolve(args) => {
            let s = args.scenarios(|s| s.outputs.comparison)?;
            Ok(for_each(s, |c| {
                let (path, run) = commands::cmd_evolve(c, &args.out)?;
                println!("{}: final linf {:.3e}", c.name, run.final_linf());
                Ok(vec![path])
            }))
        }
        Command::Validate(args) => validate(&args),
    }
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("{THREADS_ENV} must be a positive integer, got `{n}`");
                return ExitCode::from(1);
            }
        }
    }
    // clap would exit with 2 on bad arguments, which here means a failed check
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
