//! Scenario runner for the spin-cavity dispersive-readout library.
//!
//! Exit codes: 0 success, 2 config/schema error, 3 numerical singularity or
//! non-dispersive refusal, 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spincav::scenario::{run_optimize_task, run_scenario, run_shifts_task, RunReport, Scenario};
use spincav::Error;

#[derive(Parser)]
#[command(
    name = "spincav",
    version,
    about = "Cavity transmission and dispersive readout of molecular spin systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (path or bundled name) and write its outputs.
    Run {
        /// Path to a TOML scenario, or the name of a bundled one.
        config: String,
        /// Directory output paths are resolved against.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compute the per-state dispersive shift table for a scenario's model.
    Shifts {
        config: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Search the scenario's field range for the best-separated working point.
    Optimize {
        config: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// List the bundled scenarios.
    Scenarios,
    /// Run the invariant self-check suite.
    Selfcheck,
}

const BUNDLED: &[(&str, &str)] = &[
    ("toy-nv", include_str!("../scenarios/toy-nv.toml")),
    ("toy-optimize", include_str!("../scenarios/toy-optimize.toml")),
    ("gdw30", include_str!("../scenarios/gdw30.toml")),
    ("gdw30-broadened", include_str!("../scenarios/gdw30-broadened.toml")),
    ("ceer", include_str!("../scenarios/ceer.toml")),
    ("ceer-sweep", include_str!("../scenarios/ceer-sweep.toml")),
    ("yb-trensal", include_str!("../scenarios/yb-trensal.toml")),
];

fn load_scenario(config: &str) -> Result<Scenario, Error> {
    if let Some((_, text)) = BUNDLED.iter().find(|(name, _)| *name == config) {
        if !Path::new(config).exists() {
            return Scenario::from_file_text(text);
        }
    }
    Scenario::load(Path::new(config))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::UnsupportedOperator { .. }
        | Error::Unsupported(_) => 2,
        Error::SingularEvaluation { .. }
        | Error::ResonantDenominator { .. }
        | Error::NonDispersive(_)
        | Error::NoRealWorkingPoint { .. }
        | Error::Unclassifiable => 3,
        Error::Io(_) => 4,
        Error::Infeasible(_) | Error::Internal(_) => 1,
    }
}

fn print_report(report: &RunReport) {
    for line in &report.summary {
        println!("{line}");
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out_dir } => {
            let sc = load_scenario(&config)?;
            let report = run_scenario(&sc, &out_dir)?;
            print_report(&report);
        }
        Command::Shifts { config, out_dir } => {
            let sc = load_scenario(&config)?;
            let report = run_shifts_task(&sc, &out_dir)?;
            print_report(&report);
        }
        Command::Optimize { config, out_dir } => {
            let sc = load_scenario(&config)?;
            let report = run_optimize_task(&sc, &out_dir)?;
            print_report(&report);
        }
        Command::Scenarios => {
            for (name, text) in BUNDLED {
                let headline = text
                    .lines()
                    .find(|l| l.starts_with('#'))
                    .map(|l| l.trim_start_matches('#').trim())
                    .unwrap_or("");
                println!("{name:16} {headline}");
            }
        }
        Command::Selfcheck => {
            let outcomes = spincav::selfcheck::run_all()?;
            let mut all_ok = true;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                println!("{status} {name}: {detail}", name = o.name, detail = o.detail);
                all_ok &= o.passed;
            }
            if !all_ok {
                return Err(Error::Internal("selfcheck failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
