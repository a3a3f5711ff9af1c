use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcflab_cli::{builtin, compare, list_catalog, run_all, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "mcflab", version, about = "Run and compare curve shortening flow scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and write flow.csv, diagnostics.csv and summary.json.
    Run {
        /// Scenario file; may be repeated.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        /// Built-in scenario by name; may be repeated.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Parent directory for the per-scenario output directories.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the grid size of every scenario.
        #[arg(long)]
        resolution: Option<usize>,
        /// Scenarios run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List the built-in scenarios and the statement each one exercises.
    List { filter: Option<String> },
    /// Compare two summary.json files (or run directories).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Tolerance on the absolute or relative difference.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

fn load(configs: &[PathBuf], scenarios: &[String], resolution: Option<usize>) -> Result<Vec<ScenarioConfig>, CliError> {
    let mut out = Vec::new();
    for path in configs {
        out.push(ScenarioConfig::load(path)?);
    }
    for name in scenarios {
        out.push(builtin(name).ok_or_else(|| CliError::Config(format!("no built-in scenario {name}")))??);
    }
    if out.is_empty() {
        return Err(CliError::Config("nothing to run: pass --config or --scenario".into()));
    }
    match resolution {
        Some(n) => out.into_iter().map(|c| c.with_resolution(n)).collect(),
        None => Ok(out),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { configs, scenarios, out, resolution, jobs } => {
            let configs = match load(&configs, &scenarios, resolution) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let results = match run_all(&configs, out.as_deref(), jobs) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let mut code = 0;
            for (config, result) in configs.iter().zip(results) {
                match result {
                    Ok(report) if report.pass => println!("PASS {} -> {}", report.name, report.dir.display()),
                    Ok(report) => {
                        println!("FAIL {} -> {}", report.name, report.dir.display());
                        for f in &report.failed {
                            println!("  {f}");
                        }
                        code = code.max(1);
                    }
                    Err(e) => {
                        eprintln!("error in {}: {e}", config.name);
                        code = code.max(e.exit_code());
                    }
                }
            }
            ExitCode::from(code as u8)
        }
        Command::List { filter } => match list_catalog(filter.as_deref()) {
            Ok(rows) => {
                println!("{:<16} {:<16} statement", "scenario", "kind");
                for [name, kind, anchor] in rows {
                    println!("{name:<16} {kind:<16} {anchor}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Compare { a, b, tol } => match compare(&a, &b, tol) {
            Ok(diffs) => {
                let mut flagged = false;
                for d in &diffs {
                    flagged |= d.flagged;
                    println!(
                        "{} {:<32} {:>24} {:>24} abs {:.3e} rel {:.3e}",
                        if d.flagged { "DIFF" } else { "ok  " },
                        d.key,
                        d.a,
                        d.b,
                        d.abs,
                        d.rel
                    );
                }
                ExitCode::from(flagged as u8)
            }
            Err(e) => fail(&e),
        },
    }
}
