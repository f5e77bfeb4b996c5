//! Thin command-line front end over the scenario runner.
//!
//! Subcommands:
//!   run <config.json> | run --builtin <name>   execute a scenario
//!   list                                       show the built-in catalog
//!   check <manifest.json>                      re-verify a finished run
//!
//! Exit codes: 0 success, 2 configuration error, 3 invariant failure,
//! 4 numeric abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qhydro::bohm::SeedMode;
use qhydro::error::QhError;
use qhydro::io::{self, config::Scenario, ScenarioConfig};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, QhError> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("list") => {
            cmd_list();
            Ok(ExitCode::SUCCESS)
        }
        Some("check") => cmd_check(&args[1..]),
        Some("--help") | Some("-h") | None => {
            print_usage();
            Ok(ExitCode::SUCCESS)
        }
        Some(other) => Err(QhError::config("command", format!("unknown subcommand `{other}`"))),
    }
}

fn print_usage() {
    println!("qhydro — quantum-hydrodynamics workbench");
    println!();
    println!("usage:");
    println!("  qhydro run <config.json> [--seeds N] [--seed-mode quantile|uniform] [--out DIR]");
    println!("  qhydro run --builtin <name> [same flags]");
    println!("  qhydro list");
    println!("  qhydro check <manifest.json>");
    println!();
    println!("QHYDRO_OUTPUT_ROOT relocates all output directories under one root.");
}

fn cmd_list() {
    println!("built-in scenarios (run with `qhydro run --builtin <name>`):");
    println!();
    for e in io::catalog() {
        println!("  {:<26} {}", e.name, e.description);
        println!("  {:<26} reproduces: {}", "", e.reference);
    }
}

struct RunFlags {
    config_path: Option<PathBuf>,
    builtin: Option<String>,
    seeds: Option<usize>,
    seed_mode: Option<SeedMode>,
    out: Option<PathBuf>,
}

fn parse_run_flags(args: &[String]) -> Result<RunFlags, QhError> {
    let mut flags = RunFlags {
        config_path: None,
        builtin: None,
        seeds: None,
        seed_mode: None,
        out: None,
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--builtin" => {
                let name = it
                    .next()
                    .ok_or_else(|| QhError::config("--builtin", "expects a scenario name"))?;
                flags.builtin = Some(name.clone());
            }
            "--seeds" => {
                let n = it
                    .next()
                    .ok_or_else(|| QhError::config("--seeds", "expects a count"))?;
                flags.seeds = Some(n.parse().map_err(|_| {
                    QhError::config("--seeds", format!("`{n}` is not a valid count"))
                })?);
            }
            "--seed-mode" => {
                let mode = it
                    .next()
                    .ok_or_else(|| QhError::config("--seed-mode", "expects quantile|uniform"))?;
                flags.seed_mode = Some(match mode.as_str() {
                    "quantile" => SeedMode::Quantile,
                    "uniform" => SeedMode::Uniform,
                    other => {
                        return Err(QhError::config(
                            "--seed-mode",
                            format!("`{other}` is not quantile|uniform"),
                        ))
                    }
                });
            }
            "--out" => {
                let dir = it
                    .next()
                    .ok_or_else(|| QhError::config("--out", "expects a directory"))?;
                flags.out = Some(PathBuf::from(dir));
            }
            other if !other.starts_with('-') && flags.config_path.is_none() => {
                flags.config_path = Some(PathBuf::from(other));
            }
            other => {
                return Err(QhError::config("run", format!("unexpected argument `{other}`")));
            }
        }
    }
    Ok(flags)
}

fn cmd_run(args: &[String]) -> Result<ExitCode, QhError> {
    let flags = parse_run_flags(args)?;
    let mut config: ScenarioConfig = match (&flags.builtin, &flags.config_path) {
        (Some(name), None) => io::find(name)
            .ok_or_else(|| {
                QhError::config("--builtin", format!("no builtin named `{name}`; see `qhydro list`"))
            })?
            .config,
        (None, Some(path)) => ScenarioConfig::from_path(path)?,
        _ => {
            return Err(QhError::config(
                "run",
                "pass exactly one of <config.json> or --builtin <name>",
            ))
        }
    };

    if let Some(dir) = flags.out {
        config.output_dir = dir;
    }
    if let Some(n) = flags.seeds {
        match &mut config.scenario {
            Scenario::Trajectories(t) => t.seeds = n,
            _ => {
                return Err(QhError::config(
                    "--seeds",
                    "only applies to trajectory scenarios",
                ))
            }
        }
    }
    if let Some(mode) = flags.seed_mode {
        match &mut config.scenario {
            Scenario::Trajectories(t) => t.seed_mode = mode,
            _ => {
                return Err(QhError::config(
                    "--seed-mode",
                    "only applies to trajectory scenarios",
                ))
            }
        }
    }

    let manifest = io::run(&config)?;
    let dir = config.effective_output_dir();
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    for inv in &manifest.invariants {
        println!(
            "invariant {:<36} {}  (value {:.3e}, threshold {:.3e})",
            inv.name,
            if inv.passed { "pass" } else { "FAIL" },
            inv.value,
            inv.threshold
        );
    }
    println!(
        "wrote {} artifacts to {} in {:.2} s",
        manifest.artifacts.len(),
        dir.display(),
        manifest.wall_clock_seconds
    );
    if let Some(fail) = manifest.first_failure() {
        eprintln!("error: invariant `{}` failed: {}", fail.name, fail.detail);
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &[String]) -> Result<ExitCode, QhError> {
    let path = args
        .first()
        .ok_or_else(|| QhError::config("check", "expects a manifest path"))?;
    let manifest = io::check(Path::new(path))?;
    println!(
        "manifest verified: {} invariants re-evaluated and consistent",
        manifest.invariants.len()
    );
    for inv in &manifest.invariants {
        println!("invariant {:<36} pass", inv.name);
    }
    Ok(ExitCode::SUCCESS)
}
